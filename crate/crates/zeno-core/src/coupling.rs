//! Coupling models, their spectral envelopes, and slice primitives.
//!
//! Every decay integral has the form
//! `P(t) = (Γ̃/2π)·t̃²·∫ ẽnv(ω̃)·sinc²((1 - ω̃)t̃/2) dω̃`
//! in reduced units, with the envelopes
//!
//! | kind      | ẽnv(ω̃)                         |
//! |-----------|---------------------------------|
//! | DipoleEX  | ω̃³, truncated at ω̃_C           |
//! | ExactEX   | ω̃³·b(ω̃/ω̃_X)²/16                |
//! | DipoleAP  | ω̃, truncated at ω̃_C            |
//! | ExactAP   | ω̃/(1 + (ω̃/ω̃_X)²)⁴              |
//!
//! where `b` is [`bracket_exact_ex`]. The SI envelope is `ω_eg³·ẽnv`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::quadrature::integrate_smooth;
use crate::units::{AtomTransition, DerivedScales, PhysicalConstants};

/// Relative tolerance for the quadrature-backed primitives.
pub const PRIMITIVE_REL_TOL: f64 = 1e-10;

/// Default integration cutoff of ExactEX in units of `k_X`.
pub const EXACT_EX_CUTOFF_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CouplingKind {
    /// Dipole approximation, E·x coupling, hard cutoff.
    DipoleEx,
    /// Full hydrogen form factor, E·x coupling.
    ExactEx,
    /// Dipole approximation, A·p coupling, hard cutoff.
    DipoleAp,
    /// Full hydrogen form factor, A·p coupling.
    ExactAp,
}

impl CouplingKind {
    pub const ALL: [CouplingKind; 4] = [Self::DipoleEx, Self::ExactEx, Self::DipoleAp, Self::ExactAp];

    pub fn name(self) -> &'static str {
        match self {
            Self::DipoleEx => "dipole-ex",
            Self::ExactEx => "exact-ex",
            Self::DipoleAp => "dipole-ap",
            Self::ExactAp => "exact-ap",
        }
    }

    /// Kinds whose envelope is cut off by hand at `K_C`.
    pub fn is_truncated(self) -> bool {
        matches!(self, Self::DipoleEx | Self::DipoleAp)
    }
}

impl fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CouplingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                invalid(
                    "model",
                    format!("unknown coupling model `{s}` (expected dipole-ex, exact-ex, dipole-ap or exact-ap)"),
                )
            })
    }
}

/// Coupling model in SI units.
///
/// `cutoff_wavenumber` is the hard truncation of the dipole kinds. ExactEX
/// also needs one: its envelope grows linearly at large ω, so the decay
/// integral diverges logarithmically without it. ExactAP ignores it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingModel {
    pub kind: CouplingKind,
    pub cutoff_wavenumber: Option<f64>,
    pub k_x: f64,
}

impl CouplingModel {
    /// Dipole kinds cut at `K_C`, ExactEX at `10·k_X`.
    pub fn standard(kind: CouplingKind, scales: &DerivedScales, consts: &PhysicalConstants) -> Self {
        let k_x = scales.k_x(consts);
        let cutoff_wavenumber = match kind {
            CouplingKind::DipoleEx | CouplingKind::DipoleAp => Some(scales.k_c),
            CouplingKind::ExactEx => Some(EXACT_EX_CUTOFF_FACTOR * k_x),
            CouplingKind::ExactAp => None,
        };
        Self {
            kind,
            cutoff_wavenumber,
            k_x,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_x > 0.0 && self.k_x.is_finite()) {
            return Err(invalid("k_x", format!("must be positive, got {}", self.k_x)));
        }
        if let Some(k) = self.cutoff_wavenumber {
            if !(k > 0.0) {
                return Err(invalid("cutoff_wavenumber", format!("must be positive, got {k}")));
            }
        }
        Ok(())
    }

    /// Hard upper frequency of the model (rad/s), `None` if unbounded.
    pub fn cutoff_frequency(&self, consts: &PhysicalConstants) -> Option<f64> {
        match self.kind {
            CouplingKind::ExactAp => None,
            _ => self.cutoff_wavenumber.map(|k| consts.c * k),
        }
    }

    /// SI envelope at angular frequency `omega`, without the common prefactor
    /// `d²/(6π²ε₀ħc³)`.
    pub fn envelope(&self, atom: &AtomTransition, consts: &PhysicalConstants, omega: f64) -> Result<f64> {
        if omega < 0.0 {
            return Err(Error::Domain(format!("envelope needs omega >= 0, got {omega}")));
        }
        let reduced = ReducedModel::new(self, atom, consts)?;
        Ok(atom.omega_eg.powi(3) * reduced.envelope(omega / atom.omega_eg))
    }
}

/// Coupling model in reduced units (`ω_eg = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedModel {
    pub kind: CouplingKind,
    /// Hard cutoff `c·k_cut/ω_eg`.
    pub omega_cut: Option<f64>,
    /// `ω_X/ω_eg`.
    pub omega_x: f64,
}

impl ReducedModel {
    pub fn new(model: &CouplingModel, atom: &AtomTransition, consts: &PhysicalConstants) -> Result<Self> {
        model.validate()?;
        atom.validate()?;
        let scale = consts.c / atom.omega_eg;
        Ok(Self {
            kind: model.kind,
            omega_cut: match model.kind {
                CouplingKind::ExactAp => None,
                _ => model.cutoff_wavenumber.map(|k| k * scale),
            },
            omega_x: model.k_x * scale,
        })
    }

    /// Upper integration limit: the hard cutoff, or infinity for ExactAP.
    pub fn upper_limit(&self) -> Result<f64> {
        match (self.kind, self.omega_cut) {
            (CouplingKind::ExactAp, _) => Ok(f64::INFINITY),
            (_, Some(w)) if w.is_finite() => Ok(w),
            (kind, _) => Err(Error::CutoffRequired { kind: kind.name() }),
        }
    }

    /// Envelope formula without truncation. Defined for negative arguments as
    /// the smooth continuation, which the tail expansion of the sinc² rule
    /// relies on when differentiating at range ends.
    #[inline]
    pub fn raw_envelope(&self, w: f64) -> f64 {
        match self.kind {
            CouplingKind::DipoleEx => w * w * w,
            CouplingKind::DipoleAp => w,
            CouplingKind::ExactEx => {
                let b = bracket_exact_ex((w / self.omega_x).abs());
                w * w * w * b * b / 16.0
            }
            CouplingKind::ExactAp => {
                let x = w / self.omega_x;
                let q = 1.0 + x * x;
                let q2 = q * q;
                w / (q2 * q2)
            }
        }
    }

    /// Envelope including the hard cutoff.
    #[inline]
    pub fn envelope(&self, w: f64) -> f64 {
        match self.omega_cut {
            Some(cut) if self.kind != CouplingKind::ExactAp && w > cut => 0.0,
            _ => self.raw_envelope(w),
        }
    }

    /// `∫_lo^hi ẽnv dω̃`, with the range clipped to the cutoff.
    pub fn weight(&self, lo: f64, hi: f64) -> Result<f64> {
        let top = self.upper_limit()?;
        let hi = hi.min(top);
        if !(hi > lo) {
            return Ok(0.0);
        }
        Ok(match self.kind {
            CouplingKind::DipoleEx => {
                // b⁴ - a⁴ factored to stay exact on narrow slices.
                (hi - lo) * (hi + lo) * (hi * hi + lo * lo) / 4.0
            }
            CouplingKind::DipoleAp => (hi - lo) * (hi + lo) / 2.0,
            CouplingKind::ExactAp => primitive_i2_difference(lo, hi, self.omega_x),
            CouplingKind::ExactEx => primitive_i4_difference(lo, hi, self.omega_x)?,
        })
    }

    /// Envelope-weighted mean frequency of `[lo, hi]`, clipped to the cutoff.
    /// Degenerate or weightless slices return their midpoint.
    pub fn mean_frequency(&self, lo: f64, hi: f64) -> Result<f64> {
        let top = self.upper_limit()?;
        let (a, b) = (lo, hi.min(top));
        if !(b > a) {
            return Ok(if hi > lo { 0.5 * (lo + hi) } else { lo });
        }
        let mean = match self.kind {
            CouplingKind::DipoleEx => {
                let num = a.powi(4) + a.powi(3) * b + a * a * b * b + a * b.powi(3) + b.powi(4);
                let den = a.powi(3) + a * a * b + a * b * b + b.powi(3);
                0.8 * num / den
            }
            CouplingKind::DipoleAp => 2.0 / 3.0 * (a * a + a * b + b * b) / (a + b),
            CouplingKind::ExactAp => {
                primitive_i3_difference(a, b, self.omega_x) / primitive_i2_difference(a, b, self.omega_x)
            }
            CouplingKind::ExactEx => {
                primitive_i5_difference(a, b, self.omega_x)? / primitive_i4_difference(a, b, self.omega_x)?
            }
        };
        if mean.is_finite() {
            Ok(mean.clamp(a, b))
        } else {
            Ok(0.5 * (a + b))
        }
    }

    /// `∫ ẽnv dω̃` over the whole spectrum (up to the cutoff).
    pub fn total_weight(&self) -> Result<f64> {
        let top = self.upper_limit()?;
        Ok(match self.kind {
            CouplingKind::DipoleEx => top.powi(4) / 4.0,
            CouplingKind::DipoleAp => top * top / 2.0,
            CouplingKind::ExactAp => self.omega_x * self.omega_x / 6.0,
            CouplingKind::ExactEx => primitive_i4_difference(0.0, top, self.omega_x)?,
        })
    }
}

/// `1/(1+x²)² + (3/2)(1/(1+x²) + arctan(x)/x)`, the ExactEX form-factor
/// bracket. Equals 4 at `x = 0` and falls off as `(3π/4)/x`.
pub fn bracket_exact_ex(x: f64) -> f64 {
    if x < 1e-4 {
        // Three series terms are exact to double precision here.
        let y = x * x;
        return 4.0 - 4.0 * y + 4.8 * y * y;
    }
    let q = 1.0 / (1.0 + x * x);
    q * q + 1.5 * (q + x.atan() / x)
}

/// Partial sum `2·Σ_{n<n_terms} (-1)ⁿ x^{2n}(n+1)(n+2)/(2n+1)` of the
/// power series of [`bracket_exact_ex`].
pub fn series_form_factor(x: f64, n_terms: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::SeriesDivergent { x });
    }
    if n_terms == 0 {
        return Err(invalid("n_terms", "must be at least 1"));
    }
    let y = x * x;
    let mut power = 1.0;
    let mut acc = crate::summation::CompensatedSum::new();
    for n in 0..n_terms {
        let nf = n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * power * (nf + 1.0) * (nf + 2.0) / (2.0 * nf + 1.0));
        power *= y;
        if power == 0.0 {
            break;
        }
    }
    Ok(2.0 * acc.value())
}

/// Antiderivative `-(k_X²/6)(1 + (k/k_X)²)⁻³` of `k(1 + (k/k_X)²)⁻⁴`.
pub fn primitive_i2(k: f64, k_x: f64) -> f64 {
    let q = 1.0 + (k / k_x).powi(2);
    -(k_x * k_x / 6.0) / (q * q * q)
}

/// `∫_lo^hi k(1 + (k/k_X)²)⁻⁴ dk`, written without the subtraction of
/// nearly equal primitives so that narrow slices keep full precision.
pub fn primitive_i2_difference(lo: f64, hi: f64, k_x: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let alpha = 1.0 + (lo / k_x).powi(2);
    let pre = k_x * k_x / 6.0;
    if hi.is_infinite() {
        return pre / alpha.powi(3);
    }
    let beta = 1.0 + (hi / k_x).powi(2);
    let gap = (hi - lo) * (hi + lo) / (k_x * k_x);
    pre * gap * (beta * beta + beta * alpha + alpha * alpha) / (alpha.powi(3) * beta.powi(3))
}

/// `∫_lo^hi k²(1 + (k/k_X)²)⁻⁴ dk`.
///
/// Closed form `(k_X³/48)[A(lo) - A(hi) + 3 arctan(hi/k_X) - 3 arctan(lo/k_X)]`
/// with `A(k) = k k_X (k_X² - 3k²)(k² + 3k_X²)/(k² + k_X²)³`. On slices
/// narrower than 1e-3 of their position the closed form cancels, so those
/// use quadrature instead.
pub fn primitive_i3_difference(lo: f64, hi: f64, k_x: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let f = |k: f64| k * k / (1.0 + (k / k_x).powi(2)).powi(4);
    if hi.is_finite() && hi - lo < 1e-3 * hi {
        return integrate_smooth(f, lo, hi, 1e-14).value;
    }
    i3_closed_form(lo, hi, k_x)
}

pub(crate) fn i3_closed_form(lo: f64, hi: f64, k_x: f64) -> f64 {
    let a = |k: f64| {
        if k.is_infinite() {
            return 0.0;
        }
        let k2 = k * k;
        let x2 = k_x * k_x;
        k * k_x * (x2 - 3.0 * k2) * (k2 + 3.0 * x2) / (k2 + x2).powi(3)
    };
    let at = |k: f64| if k.is_infinite() { PI / 2.0 } else { (k / k_x).atan() };
    k_x.powi(3) / 48.0 * (a(lo) - a(hi) + 3.0 * (at(hi) - at(lo)))
}

fn form_factor_sq(k: f64, k_x: f64) -> f64 {
    let b = bracket_exact_ex(k / k_x);
    k * b * b / 16.0
}

/// `∫_lo^hi k²F(k)² dk` with `F(k) = (√k/4)·b(k/k_X)`.
pub fn primitive_i4_difference(lo: f64, hi: f64, k_x: f64) -> Result<f64> {
    if !(hi > lo) {
        return Ok(0.0);
    }
    check_range(lo, hi)?;
    let r = integrate_smooth(|k| k * k * form_factor_sq(k, k_x), lo, hi, PRIMITIVE_REL_TOL);
    Ok(r.require("I4 primitive")?.value)
}

/// `∫_lo^hi k³F(k)² dk`.
pub fn primitive_i5_difference(lo: f64, hi: f64, k_x: f64) -> Result<f64> {
    if !(hi > lo) {
        return Ok(0.0);
    }
    check_range(lo, hi)?;
    let r = integrate_smooth(|k| k * k * k * form_factor_sq(k, k_x), lo, hi, PRIMITIVE_REL_TOL);
    Ok(r.require("I5 primitive")?.value)
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if lo < 0.0 || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "ExactEX primitives need 0 <= lo <= hi < inf, got [{lo}, {hi}]"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bracket_limits() {
        assert_eq!(bracket_exact_ex(0.0), 4.0);
        let x = 1e7;
        assert_relative_eq!(bracket_exact_ex(x) * x, 0.75 * PI, max_relative = 1e-6);
        // Both branches agree at the switch point.
        let y: f64 = 1e-4;
        let q = 1.0 / (1.0 + y * y);
        let closed = q * q + 1.5 * (q + y.atan() / y);
        let series = 4.0 - 4.0 * y * y + 4.8 * y.powi(4);
        assert!((closed - series).abs() < 1e-14);
    }

    #[test]
    fn series_matches_bracket() {
        assert_eq!(series_form_factor(0.0, 5).unwrap(), 4.0);
        assert!((series_form_factor(0.5, 200).unwrap() - bracket_exact_ex(0.5)).abs() < 1e-10);
        assert!((series_form_factor(0.9, 2000).unwrap() - bracket_exact_ex(0.9)).abs() < 1e-8);
        assert!(matches!(series_form_factor(1.0, 10), Err(Error::SeriesDivergent { .. })));
    }

    #[test]
    fn i2_values() {
        let kx = 2.5;
        assert_relative_eq!(primitive_i2(0.0, kx), -kx * kx / 6.0);
        assert_relative_eq!(primitive_i2_difference(0.0, f64::INFINITY, kx), kx * kx / 6.0);
        assert_relative_eq!(
            primitive_i2_difference(0.0, kx, kx),
            kx * kx / 6.0 * (1.0 - 1.0 / 8.0),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            primitive_i2_difference(0.3, 1.7, kx),
            primitive_i2(1.7, kx) - primitive_i2(0.3, kx),
            max_relative = 1e-13
        );
    }

    #[test]
    fn i3_against_quadrature() {
        let kx = 1.3;
        let f = |k: f64| k * k / (1.0 + (k / kx).powi(2)).powi(4);
        let oracle = integrate_smooth(f, 0.0, kx, 1e-13).value;
        assert_relative_eq!(primitive_i3_difference(0.0, kx, kx), oracle, max_relative = 1e-10);
        assert_relative_eq!(
            primitive_i3_difference(0.0, f64::INFINITY, kx),
            PI * kx.powi(3) / 32.0,
            max_relative = 1e-13
        );
        assert_eq!(primitive_i3_difference(0.7, 0.7, kx), 0.0);
    }

    #[test]
    fn exact_ex_matches_dipole_ex_at_low_frequency() {
        let m = ReducedModel {
            kind: CouplingKind::ExactEx,
            omega_cut: Some(5470.0),
            omega_x: 547.0,
        };
        let d = ReducedModel {
            kind: CouplingKind::DipoleEx,
            omega_cut: Some(3087.0),
            omega_x: 547.0,
        };
        for w in [0.01, 1.0, 5.47] {
            assert!((m.envelope(w) / d.envelope(w) - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn truncation_and_domain() {
        let m = CouplingModel {
            kind: CouplingKind::DipoleEx,
            cutoff_wavenumber: Some(1.0e9),
            k_x: 1.0e10,
        };
        let atom = AtomTransition::hydrogen_2p_1s();
        let c = PhysicalConstants::default();
        let cut = c.c * 1.0e9;
        assert!(m.envelope(&atom, &c, cut * (1.0 + 1e-12)).unwrap() == 0.0);
        assert!(m.envelope(&atom, &c, cut * 0.5).unwrap() > 0.0);
        assert!(matches!(m.envelope(&atom, &c, -1.0), Err(Error::Domain(_))));
        let ap = CouplingModel { kind: CouplingKind::ExactAp, ..m };
        assert_eq!(ap.envelope(&atom, &c, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn parse_kind_names() {
        for k in CouplingKind::ALL {
            assert_eq!(k.name().parse::<CouplingKind>().unwrap(), k);
        }
        assert!("dipole".parse::<CouplingKind>().is_err());
    }
}
