//! Values frozen from 40-digit reference quadrature, and property checks of
//! the form-factor series.
#![allow(clippy::excessive_precision)]

use proptest::prelude::*;
use zeno_core::coupling::{
    bracket_exact_ex, primitive_i3_difference, primitive_i4_difference, primitive_i5_difference,
    series_form_factor,
};

const K_X: f64 = 547.0;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a / b - 1.0).abs() <= rel
}

#[test]
fn primitive_integrals_match_frozen_values() {
    let i3 = primitive_i3_difference(0.5, 50.0, K_X);
    assert!(close(i3, 40843.394970002271, 1e-13), "{i3}");
    let i4 = primitive_i4_difference(0.5, 300.0, K_X).unwrap();
    assert!(close(i4, 1439463045.6517851, 1e-9), "{i4}");
    let i5 = primitive_i5_difference(0.5, 300.0, K_X).unwrap();
    assert!(close(i5, 337180370590.11343, 1e-9), "{i5}");
    let far = primitive_i4_difference(100.0, 5470.0, K_X).unwrap();
    assert!(close(far, 1544254814013.6740, 1e-9), "{far}");
}

#[test]
fn i3_over_the_half_line() {
    let whole = primitive_i3_difference(0.0, 1e9, K_X);
    let exact = std::f64::consts::PI * K_X.powi(3) / 32.0;
    assert!(close(whole, exact, 1e-12));
}

#[test]
fn bracket_frozen_points() {
    assert_eq!(bracket_exact_ex(0.0), 4.0);
    // 1/(1+x²)² + 1.5(1/(1+x²) + atan(x)/x) at x = 1: 1/4 + 1.5(1/2 + π/4).
    let x1 = 0.25 + 1.5 * (0.5 + std::f64::consts::FRAC_PI_4);
    assert!((bracket_exact_ex(1.0) - x1).abs() < 1e-15);
}

proptest! {
    #[test]
    fn series_agrees_with_closed_form(x in 0.0f64..0.9) {
        let n = if x < 1e-3 { 20 } else { (-20.0 / (x * x).log10()).ceil() as usize + 10 };
        let s = series_form_factor(x, n).unwrap();
        prop_assert!((s - bracket_exact_ex(x)).abs() < 1e-10);
    }

    #[test]
    fn series_rejects_the_radius(x in 1.0f64..10.0) {
        prop_assert!(series_form_factor(x, 10).is_err());
    }

    #[test]
    fn i4_is_additive(a in 0.0f64..3000.0, w1 in 0.0f64..2000.0, w2 in 0.0f64..2000.0) {
        let (b, c) = (a + w1, a + w1 + w2);
        let whole = primitive_i4_difference(a, c, K_X).unwrap();
        let parts = primitive_i4_difference(a, b, K_X).unwrap() + primitive_i4_difference(b, c, K_X).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-9 * whole.abs().max(1e-300));
    }
}
