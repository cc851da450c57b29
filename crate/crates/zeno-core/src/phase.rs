//! Phase evaluation for products `frequency * time` that reach 1e12 rad.
//!
//! The product is formed exactly as a double-double with an FMA and reduced
//! against a double-double 2π, so the reduced angle keeps close to full
//! double precision even when the raw phase is enormous.

use std::f64::consts::TAU;

const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// Returns `omega * t` reduced to `[-π, π]`.
#[inline]
pub fn reduced_phase(omega: f64, t: f64) -> f64 {
    let p = omega * t;
    if p.abs() <= std::f64::consts::PI {
        return p;
    }
    let e = omega.mul_add(t, -p);
    let k = (p / TAU).round();
    let r = (-k).mul_add(TAU, p);
    (-k).mul_add(TAU_LO, r) + e
}

/// `(cos, sin)` of `omega * t` evaluated through [`reduced_phase`].
#[inline]
pub fn cis_phase(omega: f64, t: f64) -> (f64, f64) {
    let (s, c) = reduced_phase(omega, t).sin_cos();
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen with 60-digit decimal arithmetic on the exact binary inputs.
    const CASES: [(f64, f64, f64); 4] = [
        (1.0, 1.0e12, -0.657_624_759_136_786_4),
        (0.987_654_321, 2.5e11, 1.915_617_361_555_528),
        (3.0e3, 1.0e8, -2.710_561_550_612_870_6),
        (1.000_000_04, 6.2e7, -0.839_422_439_082_175_8),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for (omega, t, expected) in CASES {
            let got = reduced_phase(omega, t);
            assert!(
                (got - expected).abs() < 1e-9,
                "omega={omega} t={t}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn small_phases_untouched() {
        assert_eq!(reduced_phase(0.5, 2.0), 1.0);
        assert_eq!(reduced_phase(0.0, 1e300), 0.0);
    }

    #[test]
    fn stays_in_principal_range() {
        for i in 0..1000 {
            let t = 1.0e6 * (i as f64 + 0.37);
            let r = reduced_phase(1.234_567, t);
            assert!(r.abs() <= std::f64::consts::PI + 1e-12);
        }
    }
}
