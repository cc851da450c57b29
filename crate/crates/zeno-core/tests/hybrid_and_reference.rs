use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use zeno_core::discretization::{effective_coupling, effective_frequency, Slice};
use zeno_core::offshell::{norm_n, perturbed_first_order_check, perturbed_survival};
use zeno_core::phase::reduced_phase;
use zeno_core::quadrature::{integrate_smooth_with, sincsq, SmoothOptions};
use zeno_core::reference::*;
use zeno_core::spectral::{diagonalize, evolve, excited_amplitude, mode_occupation};
use zeno_core::units::{reduced_decay_rate, standard_model};
use zeno_core::*;

struct Setup {
    atom: AtomTransition,
    gamma: f64,
    model: CouplingModel,
    reduced: ReducedModel,
}

fn setup(kind: CouplingKind) -> Setup {
    let atom = AtomTransition::hydrogen_2p_1s();
    let c = PhysicalConstants::default();
    let model = standard_model(kind, &atom, &c);
    Setup {
        atom,
        gamma: reduced_decay_rate(&atom, &c),
        reduced: ReducedModel::new(&model, &atom, &c).unwrap(),
        model,
    }
}

fn ladder(s: &Setup, offshell: &OffshellSpec) -> ModeLadder {
    let c = PhysicalConstants::default();
    ModeLadder::for_atom(&s.model, &s.atom, &c, &CombSpec::standard(s.gamma), offshell).unwrap()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

#[test]
fn hybrid_starts_at_one() {
    let s = setup(CouplingKind::ExactAp);
    let h = HybridModel::from_ladder(&ladder(&s, &OffshellSpec::default())).unwrap();
    assert_eq!(h.decay_probability(0.0), 0.0);
    assert_eq!(perturbed_survival(&h, &[0.0], Execution::Sequential)[0], 1.0);
}

#[test]
fn hybrid_without_offshell_modes_is_the_comb() {
    let s = setup(CouplingKind::ExactAp);
    let l = ladder(&s, &OffshellSpec::none());
    let h = HybridModel::from_ladder(&l).unwrap();
    assert_eq!(h.norm(), 1.0);
    let times: Vec<f64> = (0..200).map(|k| k as f64 * 0.05 / s.gamma).collect();
    let comb = evolve(&h.comb, &times, false, Execution::Sequential).unwrap();
    let hyb = perturbed_survival(&h, &times, Execution::Sequential);
    for (a, b) in comb.survival.iter().zip(&hyb) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn normalization_of_a_single_weight() {
    let w = OffshellWeights {
        frequencies: vec![2.0],
        weights: vec![0.01],
    };
    assert_relative_eq!(norm_n(&w), 1.0201, max_relative = 1e-15);
    assert!(w.is_perturbative());
}

#[test]
fn offshell_grid_refinement_is_stable() {
    let s = setup(CouplingKind::ExactAp);
    let coarse = HybridModel::from_ladder(&ladder(&s, &OffshellSpec::default())).unwrap();
    let fine_spec = OffshellSpec {
        n_offshell: 200,
        n_below: 20,
        ..OffshellSpec::default()
    };
    let fine = HybridModel::from_ladder(&ladder(&s, &fine_spec)).unwrap();
    let times: Vec<f64> = log_grid(1e-20, 1e-8, 200).iter().map(|&t| s.atom.reduce_time(t)).collect();
    let a = perturbed_survival(&coarse, &times, Execution::Sequential);
    let b = perturbed_survival(&fine, &times, Execution::Sequential);
    for (x, y) in a.iter().zip(&b) {
        assert!((x / y - 1.0).abs() <= 5e-3);
    }
}

// Weights on a grid geometric in detuning, which resolves the 1/δ² density
// all the way to the comb edge.
fn weights_on_detuning_grid(s: &Setup, n: usize) -> OffshellWeights {
    let (d0, d1) = (8.0 * s.gamma, 100.0);
    let edge = |j: usize| d0 * (d1 / d0).powf(j as f64 / n as f64);
    let mut w = OffshellWeights::empty();
    for j in 0..n {
        let sl = Slice { lo: 1.0 + edge(j), hi: 1.0 + edge(j + 1) };
        let g = effective_coupling(&sl, &s.reduced, s.gamma).unwrap();
        let f = effective_frequency(&sl, &s.reduced).unwrap();
        w.frequencies.push(f);
        w.weights.push((g / (f - 1.0)).powi(2));
    }
    w
}

#[test]
fn normalization_converges_on_a_resolved_grid() {
    let s = setup(CouplingKind::ExactAp);
    let a = norm_n(&weights_on_detuning_grid(&s, 2000));
    let b = norm_n(&weights_on_detuning_grid(&s, 4000));
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn far_offshell_modes_dephase() {
    let s = setup(CouplingKind::ExactAp);
    let all = OffshellWeights::from_ladder(&ladder(&s, &OffshellSpec::default())).unwrap();
    let mut far = OffshellWeights::empty();
    for (&f, &w) in all.frequencies.iter().zip(&all.weights) {
        if (f - 1.0).abs() > 1.0 {
            far.frequencies.push(f);
            far.weights.push(w);
        }
    }
    let total = far.total();
    assert_relative_eq!(far.partial_sum(0.0).re, total, max_relative = 1e-14);
    let tau_x = 1.0 / s.reduced.omega_x;
    let late: Vec<f64> = (0..200).map(|k| 1e3 * tau_x * (1.0 + 0.037 * k as f64)).collect();
    let mean = late.iter().map(|&t| far.partial_sum(t).norm()).sum::<f64>() / late.len() as f64;
    assert!(mean < 0.1 * total, "mean |sum| {mean} vs {total}");
}

#[test]
fn dense_first_order_sum_reproduces_the_integral() {
    let s = setup(CouplingKind::ExactAp);
    let spec = OffshellSpec {
        n_offshell: 20_000,
        n_below: 2_000,
        ..OffshellSpec::default()
    };
    let l = ladder(&s, &spec);
    let times: Vec<f64> = log_grid(1e-20, 1e-17, 16).iter().map(|&t| s.atom.reduce_time(t)).collect();
    let check = perturbed_first_order_check(&l, &times, Execution::Parallel);
    for (&t, p) in times.iter().zip(check) {
        let reference = sinc_decay(&s.reduced, s.gamma, t, &IntegralRange::full(), 1e-9).unwrap().raw;
        let ratio = (1.0 - p) / reference;
        assert!((ratio - 1.0).abs() < 0.01, "t={t}: ratio {ratio}");
    }
}

#[test]
fn ww_mode_probability_limits() {
    let (g, det, gamma) = (1e-3, 0.02, 0.01);
    let early = ww_mode_probability(g, det, gamma, &[1e-6]);
    assert_relative_eq!(early[0], (g * 1e-6f64).powi(2), max_relative = 1e-5);
    let late = ww_mode_probability(g, det, gamma, &[1e5]);
    assert_relative_eq!(late[0], ww_saturation(g, det, gamma), max_relative = 1e-12);
    assert_eq!(ww_survival(gamma, &[0.0])[0], 1.0);
}

#[test]
fn ww_mode_probabilities_carry_the_lost_population() {
    let gamma = 1e-3;
    let t = 3.0 / gamma;
    let half = 400.0 * gamma;
    let n = 200_000;
    let step = 2.0 * half / n as f64;
    let g = (gamma * step / (2.0 * std::f64::consts::PI)).sqrt();
    let total: f64 = (0..n)
        .map(|j| ww_mode_probability(g, -half + (j as f64 + 0.5) * step, gamma, &[t])[0])
        .sum();
    let lost = 1.0 - (-gamma * t).exp();
    assert!((total / lost - 1.0).abs() < 0.02, "{total} vs {lost}");
}

#[test]
fn photon_amplitude_matches_mode_occupation() {
    let s = setup(CouplingKind::ExactAp);
    let l = ladder(&s, &OffshellSpec::none());
    let h = ArrowheadHamiltonian::assemble(&l).unwrap();
    let d = diagonalize(&h).unwrap();
    let n = 20_000;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * 5.0 / s.gamma / n as f64).collect();
    let c_e: Vec<Complex64> = times.iter().map(|&t| excited_amplitude(&d, t)).collect();
    for lambda in [10usize, 49, 75, 99] {
        let amp = photon_amplitude_from_record(h.couplings[lambda], h.detunings[lambda], &times, &c_e).unwrap();
        let occ = mode_occupation(&d, lambda, &times[n..], Execution::Sequential).unwrap()[0];
        assert!((amp.norm_sqr() / occ - 1.0).abs() < 5e-3, "mode {lambda}");
    }
    let sparse: Vec<f64> = times.iter().step_by(1000).copied().collect();
    let sparse_c: Vec<Complex64> = c_e.iter().step_by(1000).copied().collect();
    assert!(matches!(
        photon_amplitude_series(h.couplings[99], h.detunings[99], &sparse, &sparse_c),
        Err(Error::Undersampled { .. })
    ));
}

#[test]
fn onshell_and_offshell_parts_add_up() {
    for kind in CouplingKind::ALL {
        let s = setup(kind);
        for ts in [1e-19, 1e-16, 1e-12, 1e-9] {
            let t = s.atom.reduce_time(ts);
            let on = IntegralRange::window(reference::RangeKind::OnshellOnly, s.gamma, 16.0);
            let off = IntegralRange::window(reference::RangeKind::OffshellOnly, s.gamma, 16.0);
            let full = sinc_decay(&s.reduced, s.gamma, t, &IntegralRange::full(), 1e-11).unwrap().raw;
            let parts = sinc_decay(&s.reduced, s.gamma, t, &on, 1e-11).unwrap().raw
                + sinc_decay(&s.reduced, s.gamma, t, &off, 1e-11).unwrap().raw;
            assert!((parts / full - 1.0).abs() < 1e-9, "{kind} t={ts}");
        }
    }
}

#[test]
fn decay_grows_through_the_zeno_regime() {
    for kind in [CouplingKind::DipoleAp, CouplingKind::ExactAp] {
        let s = setup(kind);
        let tau_x = 1.0 / s.reduced.omega_x;
        let mut prev = 0.0;
        for k in 1..=40 {
            let t = tau_x * k as f64 / 40.0;
            let p = sinc_decay(&s.reduced, s.gamma, t, &IntegralRange::full(), 1e-9).unwrap().raw;
            assert!(p > prev, "{kind} not increasing at step {k}");
            prev = p;
        }
    }
}

// A hard spectral edge rings at the cutoff frequency once t > 1/ω_cut, so the
// E.x curves are only monotone before that. For exact E.x the edge is the
// finite cutoff its log-divergent weight requires.
#[test]
fn hard_cutoffs_ring_after_their_cutoff_time() {
    for kind in [CouplingKind::DipoleEx, CouplingKind::ExactEx] {
        let s = setup(kind);
        let tau_c = 1.0 / s.reduced.omega_cut.unwrap();
        let p = |t: f64| sinc_decay(&s.reduced, s.gamma, t, &IntegralRange::full(), 1e-10).unwrap().raw;
        let early: Vec<f64> = (1..=40).map(|k| p(tau_c * k as f64 / 40.0)).collect();
        assert!(early.windows(2).all(|w| w[1] > w[0]), "{kind}");
        let tau_x = 1.0 / s.reduced.omega_x;
        let late: Vec<f64> = (0..200).map(|k| p(0.5 * tau_x + 0.5 * tau_x * k as f64 / 200.0)).collect();
        assert!(late.windows(2).any(|w| w[1] < w[0]), "{kind}");
    }
}

// At t ~ 1/Γ the resonance is ~1e-7 wide on a range of ~1e4. A single global
// adaptive rule cannot certify it, and a fixed grid steps right over it.
#[test]
fn global_rules_fail_at_the_decay_time() {
    let s = setup(CouplingKind::ExactAp);
    let t = 1.0 / s.gamma;
    let proper = sinc_decay(&s.reduced, s.gamma, t, &IntegralRange::full(), 1e-9).unwrap().raw;
    let f = |w: f64| s.reduced.envelope(w) * sincsq(0.5 * (1.0 - w) * t);
    let top = 100.0 * s.reduced.omega_x;
    let adaptive = integrate_smooth_with(f, 0.0, top, &SmoothOptions::default());
    assert!(!adaptive.converged);

    let n = 100_000;
    let h = top / n as f64;
    let mut acc = f(0.0) + f(top);
    for k in 1..n {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(h * k as f64);
    }
    let simpson = s.gamma / (2.0 * std::f64::consts::PI) * t * t * acc * h / 3.0;
    assert!(simpson < 0.5 * proper, "fixed grid {simpson} vs {proper}");
}

#[test]
fn first_order_decay_is_linear_in_gamma() {
    let s = setup(CouplingKind::ExactEx);
    let t = s.atom.reduce_time(1e-16);
    let a = sinc_decay(&s.reduced, s.gamma, t, &IntegralRange::full(), 1e-10).unwrap().raw;
    let b = sinc_decay(&s.reduced, 3.0 * s.gamma, t, &IntegralRange::full(), 1e-10).unwrap().raw;
    assert_relative_eq!(b / a, 3.0, max_relative = 1e-12);
}

#[test]
fn brute_force_trapezoid_agrees_in_the_fermi_regime() {
    let s = setup(CouplingKind::ExactAp);
    let t = s.atom.reduce_time(1e-12);
    let (lo, hi) = (0.5, 1.5);
    let n = 10_000_000usize;
    let h = (hi - lo) / n as f64;
    let f = |w: f64| s.reduced.envelope(w) * sincsq(0.5 * (1.0 - w) * t);
    let mut acc = 0.5 * (f(lo) + f(hi));
    for k in 1..n {
        acc += f(lo + h * k as f64);
    }
    let brute = s.gamma / (2.0 * std::f64::consts::PI) * t * t * acc * h;
    let on = IntegralRange::window(reference::RangeKind::OnshellOnly, s.gamma, 1.0 / s.gamma);
    let quad = sinc_decay(&s.reduced, s.gamma, t, &on, 1e-10).unwrap().raw;
    assert!((brute / quad - 1.0).abs() < 1e-6, "{brute} vs {quad}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hybrid_probability_stays_in_range(ts in -20.0f64..-8.0, kind in 0usize..4) {
        let s = setup(CouplingKind::ALL[kind]);
        let h = HybridModel::from_ladder(&ladder(&s, &OffshellSpec::default())).unwrap();
        let p = h.decay_probability(s.atom.reduce_time(10f64.powf(ts)));
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn reduced_phase_is_equivalent(omega in -10.0f64..10.0, t in 0.0f64..1e4) {
        let r = reduced_phase(omega, t);
        prop_assert!(r.abs() <= std::f64::consts::PI + 1e-15);
        prop_assert!(((omega * t).cos() - r.cos()).abs() < 1e-10);
        prop_assert!(((omega * t).sin() - r.sin()).abs() < 1e-10);
    }
}
