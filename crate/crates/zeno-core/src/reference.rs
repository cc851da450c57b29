//! Analytic and semi-analytic reference curves.
//!
//! All functions take reduced quantities: rates and frequencies in units of
//! `ω_eg`, times in units of `1/ω_eg`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::coupling::{CouplingKind, ReducedModel};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_sincsq_with, SincSqOptions};
use crate::summation::CompensatedComplexSum;

/// Default tolerance of the decay integrals in time sweeps.
pub const SWEEP_REL_TOL: f64 = 1e-8;

/// Wigner-Weisskopf survival `e^{-Γt}`.
pub fn ww_survival(gamma: f64, times: &[f64]) -> Vec<f64> {
    times.iter().map(|&t| (-gamma * t).exp()).collect()
}

/// Wigner-Weisskopf occupation of a mode with coupling `g` and detuning
/// `δ = ω_λ - ω_eg`: `g²|e^{(iδ - Γ/2)t} - 1|²/(δ² + Γ²/4)`.
pub fn ww_mode_probability(g: f64, detuning: f64, gamma: f64, times: &[f64]) -> Vec<f64> {
    let denom = detuning * detuning + 0.25 * gamma * gamma;
    times
        .iter()
        .map(|&t| {
            // e^z - 1 assembled from expm1 and a half-angle cosine so small t
            // keeps its relative precision.
            let re = -0.5 * gamma * t;
            let im = detuning * t;
            let (s, c) = im.sin_cos();
            let half = (0.5 * im).sin();
            let real = re.exp_m1() * c - 2.0 * half * half;
            let imag = re.exp() * s;
            if denom == 0.0 {
                (g * t).powi(2)
            } else {
                g * g * (real * real + imag * imag) / denom
            }
        })
        .collect()
}

/// Long-time limit `g²/(δ² + Γ²/4)` of [`ww_mode_probability`].
pub fn ww_saturation(g: f64, detuning: f64, gamma: f64) -> f64 {
    g * g / (detuning * detuning + 0.25 * gamma * gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeKind {
    Full,
    OnshellOnly,
    OffshellOnly,
}

/// Which part of the spectrum enters a decay integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralRange {
    pub kind: RangeKind,
    /// Half-width of the on-shell window around resonance (reduced).
    pub onshell_halfwidth: f64,
}

impl IntegralRange {
    pub fn full() -> Self {
        Self {
            kind: RangeKind::Full,
            onshell_halfwidth: f64::NAN,
        }
    }

    /// Window of `width_in_gamma/2` on each side of resonance.
    pub fn window(kind: RangeKind, gamma: f64, width_in_gamma: f64) -> Self {
        Self {
            kind,
            onshell_halfwidth: 0.5 * width_in_gamma * gamma,
        }
    }
}

/// First-order decay probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincDecay {
    /// Unclipped value of the first-order integral.
    pub raw: f64,
    pub abs_error: f64,
    /// True when `raw > 1`, outside the validity of first order.
    pub exceeds_unity: bool,
    /// True for hard-cutoff dipole models when most of the decay comes from
    /// modes above `ω_X`, where the dipole approximation does not hold.
    pub beyond_dipole_validity: bool,
}

impl SincDecay {
    /// Value clipped to `[0, 1]` for plotting.
    pub fn clipped(&self) -> f64 {
        self.raw.clamp(0.0, 1.0)
    }

    pub fn nonphysical(&self) -> bool {
        self.exceeds_unity || self.beyond_dipole_validity
    }
}

/// `(Γ̃/2π)·t²·∫ ẽnv(ω)·sinc²((1-ω)t/2) dω` over `range`.
pub fn sinc_decay(
    model: &ReducedModel,
    gamma: f64,
    t: f64,
    range: &IntegralRange,
    rel_tol: f64,
) -> Result<SincDecay> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("must be nonnegative, got {t}")));
    }
    let top = model.upper_limit()?;
    let pieces: Vec<(f64, f64)> = match range.kind {
        RangeKind::Full => vec![(0.0, top)],
        RangeKind::OnshellOnly | RangeKind::OffshellOnly => {
            let hw = range.onshell_halfwidth;
            if !(hw > 0.0) {
                return Err(invalid("onshell_halfwidth", format!("must be positive, got {hw}")));
            }
            let (a, b) = ((1.0 - hw).max(0.0), (1.0 + hw).min(top));
            if range.kind == RangeKind::OnshellOnly {
                vec![(a, b)]
            } else {
                vec![(0.0, a), (b, top)]
            }
        }
    };
    let opts = SincSqOptions {
        rel_tol,
        tail_scale: model.omega_x,
        ..SincSqOptions::default()
    };
    let prefactor = gamma / (2.0 * PI) * t * t;
    let env = |w: f64| model.raw_envelope(w);
    let mut raw = 0.0;
    let mut err = 0.0;
    for (lo, hi) in pieces {
        if hi > lo {
            let r = integrate_sincsq_with(env, 1.0, t, lo, hi, &opts)?;
            raw += r.value;
            err += r.abs_error_estimate;
        }
    }

    let mut beyond = false;
    if model.kind.is_truncated() && top > model.omega_x && range.kind == RangeKind::Full && t > 0.0 {
        let high = integrate_sincsq_with(env, 1.0, t, model.omega_x, top, &opts)?.value;
        beyond = high > raw - high;
    }
    let raw = prefactor * raw;
    let exceeds_unity = raw > 1.0;
    if exceeds_unity {
        log::warn!("first-order decay probability {raw:.4} exceeds 1 at reduced time {t:.4e}");
    }
    Ok(SincDecay {
        raw,
        abs_error: prefactor * err,
        exceeds_unity,
        beyond_dipole_validity: beyond,
    })
}

/// `P(t)/t²` as `t → 0`, i.e. `(Γ̃/2π)·∫ ẽnv`.
pub fn zeno_coefficient(model: &ReducedModel, gamma: f64) -> Result<f64> {
    Ok(gamma / (2.0 * PI) * model.total_weight()?)
}

/// Running photon amplitude `g∫₀^t c_e(t')e^{iδt'}dt'` by the trapezoid rule
/// over a recorded excited-state amplitude. Entry `k` is the amplitude at
/// `times[k]`.
pub fn photon_amplitude_series(
    g: f64,
    detuning: f64,
    times: &[f64],
    c_e: &[Complex64],
) -> Result<Vec<Complex64>> {
    const MAX_PHASE_STEP: f64 = 0.1;
    if times.len() != c_e.len() || times.is_empty() {
        return Err(invalid("survival_record", "times and amplitudes must be nonempty and of equal length"));
    }
    for w in times.windows(2) {
        let step = (detuning * (w[1] - w[0])).abs();
        if step >= MAX_PHASE_STEP {
            return Err(Error::Undersampled {
                phase_step: step,
                bound: MAX_PHASE_STEP,
            });
        }
    }
    let integrand = |k: usize| c_e[k] * Complex64::from_polar(1.0, detuning * times[k]);
    let mut acc = CompensatedComplexSum::new();
    let mut out = Vec::with_capacity(times.len());
    out.push(Complex64::new(0.0, 0.0));
    for k in 1..times.len() {
        acc.add((integrand(k - 1) + integrand(k)) * (0.5 * (times[k] - times[k - 1])));
        out.push(acc.value() * g);
    }
    Ok(out)
}

/// Photon amplitude at the end of the record.
pub fn photon_amplitude_from_record(
    g: f64,
    detuning: f64,
    times: &[f64],
    c_e: &[Complex64],
) -> Result<Complex64> {
    Ok(*photon_amplitude_series(g, detuning, times, c_e)?
        .last()
        .expect("series is nonempty"))
}

/// Kind-specific label used in reports.
pub fn model_label(kind: CouplingKind) -> &'static str {
    match kind {
        CouplingKind::DipoleEx => "dipole E.x, truncated",
        CouplingKind::ExactEx => "exact E.x",
        CouplingKind::DipoleAp => "dipole A.p, truncated",
        CouplingKind::ExactAp => "exact A.p",
    }
}
