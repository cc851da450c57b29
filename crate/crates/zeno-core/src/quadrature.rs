//! Adaptive Gauss-Kronrod integration and the sinc²-weighted scheme.
//!
//! [`integrate_sincsq`] never hands the oscillatory integrand to a global
//! adaptive rule. Near resonance it integrates one π-interval of
//! `u = (ω - ω₀)t/2` per panel; far from resonance it splits
//! `sin²u = (1 - cos 2u)/2`, integrates the smooth part directly and the
//! oscillatory part by repeated integration by parts.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::phase::reduced_phase;
use crate::summation::CompensatedSum;

// Nodes and weights as tabulated, beyond f64 precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub panels_used: usize,
    pub converged: bool,
}

impl QuadratureResult {
    fn zero() -> Self {
        Self {
            value: 0.0,
            abs_error_estimate: 0.0,
            panels_used: 0,
            converged: true,
        }
    }

    /// Converts a non-converged result into [`Error::Convergence`].
    pub fn require(self, what: &'static str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Convergence {
                what,
                value: self.value,
                achieved: self.abs_error_estimate,
            })
        }
    }
}

/// Settings for [`integrate_smooth_with`].
#[derive(Debug, Clone, Copy)]
pub struct SmoothOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for SmoothOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_panels: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One 15-point Kronrod application with the QUADPACK error heuristic.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Adaptive integral of a smooth function over a finite interval.
pub fn integrate_smooth<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> QuadratureResult {
    integrate_smooth_with(
        f,
        a,
        b,
        &SmoothOptions {
            rel_tol,
            ..SmoothOptions::default()
        },
    )
}

/// [`integrate_smooth`] with explicit tolerances and panel budget.
///
/// The worst panel is bisected until the summed error estimate meets
/// `max(abs_tol, rel_tol·|value|)`. The returned value is re-summed over
/// panels in ascending position so it does not depend on refinement order.
pub fn integrate_smooth_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &SmoothOptions,
) -> QuadratureResult {
    if a == b {
        return QuadratureResult::zero();
    }
    if b < a {
        let mut r = integrate_smooth_with(f, b, a, opts);
        r.value = -r.value;
        return r;
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    let mut panels = 1usize;
    let tol = |total: f64| opts.abs_tol.max(opts.rel_tol * total.abs());
    while total_err > tol(total) && panels < opts.max_panels {
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in double precision.
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        panels += 1;
    }
    let mut list = heap.into_vec();
    list.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = CompensatedSum::new();
    let mut err = CompensatedSum::new();
    for p in &list {
        value.add(p.value);
        err.add(p.error);
    }
    let value = value.value();
    let abs_error_estimate = err.value().max(0.0);
    QuadratureResult {
        value,
        abs_error_estimate,
        panels_used: list.len(),
        converged: abs_error_estimate <= tol(value),
    }
}

/// Integral over `[a, ∞)` through the map `ω = a + scale·v/(1 - v)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    rel_tol: f64,
) -> QuadratureResult {
    let g = |v: f64| {
        let w = 1.0 - v;
        let x = a + scale * v / w;
        let fx = f(x);
        if fx == 0.0 {
            0.0
        } else {
            fx * scale / (w * w)
        }
    };
    integrate_smooth(g, 0.0, 1.0, rel_tol)
}

/// Settings for [`integrate_sincsq_with`].
#[derive(Debug, Clone, Copy)]
pub struct SincSqOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of π-panels around resonance before the asymptotic tail takes over.
    pub panel_budget: usize,
    /// Length scale of the upper-tail map when `ω_max` is infinite.
    pub tail_scale: f64,
}

impl Default for SincSqOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-300,
            panel_budget: 20_000,
            tail_scale: 1.0,
        }
    }
}

/// `∫ envelope(ω)·sinc²((ω₀ - ω)t/2) dω` over `[ω_min, ω_max]`.
pub fn integrate_sincsq<F: Fn(f64) -> f64>(
    envelope: F,
    omega0: f64,
    t: f64,
    omega_min: f64,
    omega_max: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    integrate_sincsq_with(
        envelope,
        omega0,
        t,
        omega_min,
        omega_max,
        &SincSqOptions {
            rel_tol,
            ..SincSqOptions::default()
        },
    )
}

/// [`integrate_sincsq`] with explicit options.
///
/// `envelope` must be smooth on a neighbourhood of the closed range: the
/// tail expansion differentiates it numerically at the range ends, so a
/// truncated envelope should be passed untruncated with the truncation
/// expressed through `omega_max`.
pub fn integrate_sincsq_with<F: Fn(f64) -> f64>(
    envelope: F,
    omega0: f64,
    t: f64,
    omega_min: f64,
    omega_max: f64,
    opts: &SincSqOptions,
) -> Result<QuadratureResult> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid("t", format!("must be finite and nonnegative, got {t}")));
    }
    if !omega_min.is_finite() || !(omega_max >= omega_min) {
        return Err(invalid(
            "omega range",
            format!("[{omega_min}, {omega_max}] is not a valid interval"),
        ));
    }
    if omega_min == omega_max {
        return Ok(QuadratureResult::zero());
    }
    let smooth_opts = SmoothOptions {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        ..SmoothOptions::default()
    };
    if t == 0.0 {
        let r = if omega_max.is_finite() {
            integrate_smooth_with(&envelope, omega_min, omega_max, &smooth_opts)
        } else {
            integrate_to_infinity(&envelope, omega_min, opts.tail_scale, opts.rel_tol)
        };
        return r.require("sinc² integral");
    }

    let half_t = 0.5 * t;
    if omega_max.is_finite() {
        let x_max = (omega0 - omega_min).abs().max((omega_max - omega0).abs()) * half_t;
        if x_max < 0.05 {
            let r = integrate_smooth_with(
                |w| envelope(w) * sincsq_taylor((omega0 - w) * half_t),
                omega_min,
                omega_max,
                &smooth_opts,
            );
            return r.require("sinc² integral");
        }
    }

    let half_panels = (opts.panel_budget / 2).max(1) as f64;
    let u0 = half_panels * PI;
    let u_lo = (omega_min - omega0) * half_t;
    let u_hi = if omega_max.is_finite() {
        (omega_max - omega0) * half_t
    } else {
        f64::INFINITY
    };

    let mut value = CompensatedSum::new();
    let mut error = 0.0;
    let mut panels = 0usize;

    // Far region below resonance: u in [u_lo, -u0].
    if u_lo < -u0 {
        let inner = omega0 - u0 / half_t;
        let outer = omega_min;
        let far = far_region(&envelope, omega0, t, outer, inner, false, true, opts)?;
        value.add(far.value);
        error += far.abs_error_estimate;
        panels += far.panels_used;
    }

    // Near region, one panel per π-interval of u.
    let ua = u_lo.max(-u0);
    let ub = u_hi.min(u0);
    if ua < ub {
        let jacobian = 1.0 / half_t;
        let integrand = |u: f64| envelope(omega0 + u / half_t) * sincsq(u);
        let k_first = (ua / PI).floor() as i64 + 1;
        let k_last = (ub / PI).ceil() as i64 - 1;
        let mut left = ua;
        let mut k = k_first;
        loop {
            let right = if k <= k_last { k as f64 * PI } else { ub };
            if right > left {
                let r = integrate_smooth_with(integrand, left, right, &smooth_opts);
                value.add(r.value * jacobian);
                error += r.abs_error_estimate * jacobian;
                panels += r.panels_used;
            }
            if k > k_last {
                break;
            }
            left = right;
            k += 1;
        }
    }

    // Far region above resonance: u in [u0, u_hi].
    if u_hi > u0 {
        let inner = omega0 + u0 / half_t;
        let far = far_region(&envelope, omega0, t, inner, omega_max, true, false, opts)?;
        value.add(far.value);
        error += far.abs_error_estimate;
        panels += far.panels_used;
    }

    let value = value.value();
    let converged = error <= opts.abs_tol.max(opts.rel_tol * value.abs());
    QuadratureResult {
        value,
        abs_error_estimate: error,
        panels_used: panels,
        converged,
    }
    .require("sinc² integral")
}

/// `(2/t²)∫ h(ω)(1 - cos φ) dω` with `h = env/(ω-ω₀)²`, `φ = (ω-ω₀)t`,
/// over `[a, b]` lying entirely on one side of resonance. An aligned
/// endpoint sits on a multiple of π in `u`, where `sin φ = 0` and
/// `cos φ = 1` hold exactly.
#[allow(clippy::too_many_arguments)]
fn far_region<F: Fn(f64) -> f64>(
    envelope: &F,
    omega0: f64,
    t: f64,
    a: f64,
    b: f64,
    a_aligned: bool,
    b_aligned: bool,
    opts: &SincSqOptions,
) -> Result<QuadratureResult> {
    let h = |w: f64| {
        let d = w - omega0;
        envelope(w) / (d * d)
    };
    let smooth = if b.is_finite() {
        integrate_smooth_with(
            h,
            a,
            b,
            &SmoothOptions {
                rel_tol: opts.rel_tol * 1e-2,
                abs_tol: opts.abs_tol,
                ..SmoothOptions::default()
            },
        )
    } else {
        let scale = opts.tail_scale.max(a - omega0);
        integrate_to_infinity(h, a, scale, opts.rel_tol * 1e-2)
    }
    .require("sinc² tail")?;

    // Boundary terms of ∫ h cos φ dω after three integrations by parts;
    // the size of the last kept term bounds the dropped remainder.
    let bracket = |w: f64, aligned: bool| -> (f64, f64) {
        let step = 1e-3 * (w - omega0).abs().min(omega0.abs().max(f64::MIN_POSITIVE));
        let (d1, d2) = derivatives(&h, w, step);
        let (s, c) = if aligned {
            (0.0, 1.0)
        } else {
            reduced_phase(w - omega0, t).sin_cos()
        };
        let term = h(w) * s / t + d1 * c / (t * t) - d2 * s / (t * t * t);
        (term, d2.abs() / (t * t * t))
    };
    let (upper, upper_rem) = if b.is_finite() {
        bracket(b, b_aligned)
    } else {
        (0.0, 0.0)
    };
    let (lower, lower_rem) = bracket(a, a_aligned);
    let oscillatory = upper - lower;
    let remainder = upper_rem + lower_rem;

    let scale = 2.0 / (t * t);
    Ok(QuadratureResult {
        value: scale * (smooth.value - oscillatory),
        abs_error_estimate: scale * (smooth.abs_error_estimate + remainder),
        panels_used: smooth.panels_used,
        converged: true,
    })
}

/// First two derivatives by five-point central differences.
fn derivatives<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> (f64, f64) {
    let fm2 = f(x - 2.0 * h);
    let fm1 = f(x - h);
    let f0 = f(x);
    let fp1 = f(x + h);
    let fp2 = f(x + 2.0 * h);
    let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    (d1, d2)
}

/// `sin²u / u²` with the removable point handled.
#[inline]
pub fn sincsq(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        sincsq_taylor(u)
    } else {
        let s = u.sin() / u;
        s * s
    }
}

#[inline]
fn sincsq_taylor(x: f64) -> f64 {
    let y = x * x;
    1.0 - y / 3.0 + y * y * (2.0 / 45.0) - y * y * y / 315.0
}
