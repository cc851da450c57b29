use approx::assert_relative_eq;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use zeno_core::spectral::{
    diagonalize, evolve, excited_amplitude, first_revival, max_residual, mode_amplitudes, mode_occupation,
    recurrence_time,
};
use zeno_core::{ArrowheadHamiltonian, Execution};

fn dense_eigenvalues(h: &ArrowheadHamiltonian) -> Vec<f64> {
    let n = h.dim();
    let m = DMatrix::from_row_slice(n, n, &h.to_dense());
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

// Fixed-step RK4 on i dc/dt = H c.
fn rk4(h: &ArrowheadHamiltonian, t_end: f64, steps: usize) -> Vec<Complex64> {
    let n = h.dim();
    let deriv = |c: &[Complex64]| -> Vec<Complex64> {
        let re: Vec<f64> = c.iter().map(|z| z.re).collect();
        let im: Vec<f64> = c.iter().map(|z| z.im).collect();
        let (hr, hi) = (h.apply(&re), h.apply(&im));
        (0..n).map(|k| Complex64::new(hi[k], -hr[k])).collect()
    };
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    c[0] = Complex64::new(1.0, 0.0);
    let dt = t_end / steps as f64;
    for _ in 0..steps {
        let k1 = deriv(&c);
        let c2: Vec<_> = (0..n).map(|k| c[k] + k1[k] * (0.5 * dt)).collect();
        let k2 = deriv(&c2);
        let c3: Vec<_> = (0..n).map(|k| c[k] + k2[k] * (0.5 * dt)).collect();
        let k3 = deriv(&c3);
        let c4: Vec<_> = (0..n).map(|k| c[k] + k3[k] * dt).collect();
        let k4 = deriv(&c4);
        for k in 0..n {
            c[k] += (k1[k] + k2[k] * 2.0 + k3[k] * 2.0 + k4[k]) * (dt / 6.0);
        }
    }
    c
}

#[test]
fn single_resonant_mode_oscillates() {
    let g = 0.3;
    let h = ArrowheadHamiltonian::new(vec![0.0], vec![g]).unwrap();
    let d = diagonalize(&h).unwrap();
    assert_relative_eq!(d.eigenfrequencies[0], -g, epsilon = 1e-15);
    assert_relative_eq!(d.eigenfrequencies[1], g, epsilon = 1e-15);
    let times: Vec<f64> = (0..50).map(|k| 0.17 * k as f64).collect();
    let curve = evolve(&d, &times, true, Execution::Sequential).unwrap();
    for (k, &t) in times.iter().enumerate() {
        assert!((curve.survival[k] - (g * t).cos().powi(2)).abs() < 1e-14);
        let occ = &curve.occupations.as_ref().unwrap()[k];
        assert!((occ[0] - (g * t).sin().powi(2)).abs() < 1e-14);
    }
}

#[test]
fn degenerate_modes_leave_the_antisymmetric_combination_empty() {
    let (g1, g2) = (0.2, 0.5);
    let h = ArrowheadHamiltonian::new(vec![0.1, 0.1], vec![g1, g2]).unwrap();
    let d = diagonalize(&h).unwrap();
    assert!(max_residual(&h, &d) < 1e-14);
    let times: Vec<f64> = (0..40).map(|k| 0.31 * k as f64).collect();
    for &t in &times {
        let a = mode_amplitudes(&d, t);
        let dark = (a[0] * g2 - a[1] * g1) / (g1 * g1 + g2 * g2).sqrt();
        assert!(dark.norm() < 1e-14, "dark state populated at t={t}");
    }
    // A zero-coupling mode is fully decoupled and keeps its bare frequency.
    let h = ArrowheadHamiltonian::new(vec![-0.4, 0.2, 0.7], vec![0.1, 0.0, 0.3]).unwrap();
    let d = diagonalize(&h).unwrap();
    assert!(d.eigenfrequencies.iter().any(|&w| (w - 0.2).abs() < 1e-15));
    let occ = mode_occupation(&d, 1, &times, Execution::Sequential).unwrap();
    assert!(occ.iter().all(|&p| p < 1e-28));
}

#[test]
fn uncoupled_comb_never_decays() {
    let h = ArrowheadHamiltonian::new(vec![-1.0, 0.0, 1.0], vec![0.0; 3]).unwrap();
    let d = diagonalize(&h).unwrap();
    let curve = evolve(&d, &[0.0, 1.0, 1e6], false, Execution::Sequential).unwrap();
    assert!(curve.survival.iter().all(|&p| p == 1.0));
}

#[test]
fn survival_at_zero_is_one() {
    let h = ArrowheadHamiltonian::new(vec![-0.3, -0.1, 0.05, 0.2], vec![0.05, 0.1, 0.02, 0.07]).unwrap();
    let d = diagonalize(&h).unwrap();
    assert!((excited_amplitude(&d, 0.0).norm_sqr() - 1.0).abs() < 1e-14);
}

#[test]
fn matches_runge_kutta_on_small_combs() {
    let cases = [
        (vec![0.0], vec![0.2]),
        (vec![-0.5, 0.5], vec![0.1, 0.3]),
        (vec![-0.2, 0.0, 0.3, 0.9], vec![0.05, 0.2, 0.1, 0.4]),
        (vec![-1.0, -0.4, -0.1, 0.1, 0.4, 1.0], vec![0.1; 6]),
    ];
    let gamma = 0.25;
    for (det, g) in cases {
        let h = ArrowheadHamiltonian::new(det, g).unwrap();
        let d = diagonalize(&h).unwrap();
        let t_end = 1.0 / gamma;
        let c = rk4(&h, t_end, 20_000);
        let amp = excited_amplitude(&d, t_end);
        assert!((amp - c[0]).norm() < 1e-8);
        let modes = mode_amplitudes(&d, t_end);
        for (a, b) in modes.iter().zip(&c[1..]) {
            assert!((a - b).norm() < 1e-8);
        }
    }
}

#[test]
fn recurrence_time_doubles_with_mode_count() {
    let build = |n: usize| {
        let det: Vec<f64> = (0..n).map(|j| -1.0 + 2.0 * (j as f64 + 0.5) / n as f64).collect();
        let h = ArrowheadHamiltonian::new(det, vec![0.01; n]).unwrap();
        recurrence_time(&diagonalize(&h).unwrap()).unwrap()
    };
    let (a, b) = (build(40), build(80));
    assert!((b / a - 2.0).abs() < 0.03);
}

#[test]
fn revival_appears_near_the_estimate() {
    let n = 60;
    let width = 1.0;
    let spacing = width / n as f64;
    let gamma = 0.05;
    let det: Vec<f64> = (0..n).map(|j| -0.5 * width + (j as f64 + 0.5) * spacing).collect();
    let g = (gamma * spacing / (2.0 * std::f64::consts::PI)).sqrt();
    let h = ArrowheadHamiltonian::new(det, vec![g; n]).unwrap();
    let d = diagonalize(&h).unwrap();
    let est = recurrence_time(&d).unwrap();
    let times: Vec<f64> = (0..=20_000).map(|k| 1.5 * est * k as f64 / 20_000.0).collect();
    let curve = evolve(&d, &times, false, Execution::Sequential).unwrap();
    let t = first_revival(&times, &curve.survival, 0.05, 0.1).expect("revival");
    assert!((t / est - 1.0).abs() < 0.05, "revival at {t}, estimate {est}");
}

#[test]
fn time_reversal_conjugates_the_amplitude() {
    let h = ArrowheadHamiltonian::new(vec![-0.3, 0.1, 0.4], vec![0.1, 0.2, 0.05]).unwrap();
    let d = diagonalize(&h).unwrap();
    let t = 7.3;
    let fwd = excited_amplitude(&d, t);
    // e^{+iHt} applied to e^{-iHt}|e>: the projection back onto |e> is 1.
    let modes = mode_amplitudes(&d, t);
    let mut back = Complex64::new(0.0, 0.0);
    for i in 0..d.dim() {
        let v = d.eigenvector(i);
        let proj = fwd * v[0] + modes.iter().zip(&v[1..]).map(|(a, e)| a * e).sum::<Complex64>();
        back += proj * v[0] * Complex64::from_polar(1.0, d.eigenfrequencies[i] * t);
    }
    assert!((back - 1.0).norm() < 1e-13);
}

fn arrowhead_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..30).prop_flat_map(|n| {
        (
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(0.0f64..0.2, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_match_dense_solver((det, g) in arrowhead_strategy()) {
        let h = ArrowheadHamiltonian::new(det, g).unwrap();
        let d = diagonalize(&h).unwrap();
        let dense = dense_eigenvalues(&h);
        for (a, b) in d.eigenfrequencies.iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_interlace_the_poles((det, g) in arrowhead_strategy()) {
        let h = ArrowheadHamiltonian::new(det, g).unwrap();
        let d = diagonalize(&h).unwrap();
        let ev = &d.eigenfrequencies;
        let poles = &h.detunings;
        for i in 0..poles.len() {
            prop_assert!(ev[i] <= poles[i] + 1e-14);
            prop_assert!(poles[i] <= ev[i + 1] + 1e-14);
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal((det, g) in arrowhead_strategy()) {
        let h = ArrowheadHamiltonian::new(det, g).unwrap();
        let d = diagonalize(&h).unwrap();
        prop_assert!(max_residual(&h, &d) <= 1e-12 * h.norm().max(1e-300));
        for i in 0..d.dim() {
            for j in 0..d.dim() {
                let dot: f64 = d.eigenvector(i).iter().zip(d.eigenvector(j)).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn evolution_is_unitary((det, g) in arrowhead_strategy(), t in 0.0f64..500.0) {
        let h = ArrowheadHamiltonian::new(det, g).unwrap();
        let d = diagonalize(&h).unwrap();
        let total = excited_amplitude(&d, t).norm_sqr()
            + mode_amplitudes(&d, t).iter().map(|a| a.norm_sqr()).sum::<f64>();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}
