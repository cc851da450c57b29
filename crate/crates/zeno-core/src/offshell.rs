//! Off-resonant modes added to the exact comb at first order.
//!
//! Each off-shell mode λ enters the perturbed excited state with weight
//! `w_λ = g_λ²/(1 - ω_λ)²` and keeps its bare frequency. With
//! `√N = 1 + Σ w_λ` the survival probability is
//!
//! `P(t) = |Σᵢ pᵢ e^{-iωᵢt} + Σ_λ w_λ e^{-i(ω_λ-1)t}|² / N`,
//!
//! where `pᵢ = |εⁱ₀|²` are the comb overlaps. It is evaluated as
//! `1 - (4/N)·Σ_{j<k} a_j a_k sin²((θ_j - θ_k)/2)` over all amplitudes
//! `a` and phases `θ`, which keeps full relative precision in the tiny
//! decay probabilities of the Zeno regime and gives `P(0) = 1` exactly.

use num_complex::Complex64;

use crate::discretization::{ModeLadder, Region};
use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::phase::reduced_phase;
use crate::spectral::{diagonalize, ArrowheadHamiltonian, SpectralDecomposition};
use crate::summation::{CompensatedComplexSum, CompensatedSum};

/// Above this total weight the first-order treatment is suspect.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

/// First-order weights of the off-shell modes, ascending in frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct OffshellWeights {
    /// Absolute reduced frequencies `ω_λ/ω_eg`.
    pub frequencies: Vec<f64>,
    pub weights: Vec<f64>,
}

impl OffshellWeights {
    pub fn empty() -> Self {
        Self {
            frequencies: Vec::new(),
            weights: Vec::new(),
        }
    }

    /// Weights of every off-shell mode of a ladder. Fails if a slice
    /// contains the transition frequency.
    pub fn from_ladder(ladder: &ModeLadder) -> Result<Self> {
        let mut frequencies = Vec::with_capacity(ladder.offshell_count);
        let mut weights = Vec::with_capacity(ladder.offshell_count);
        for m in ladder.modes.iter().filter(|m| m.region != Region::Comb) {
            if m.slice.contains(1.0) {
                return Err(invalid(
                    "offshell",
                    format!("slice [{}, {}] contains the transition frequency", m.slice.lo, m.slice.hi),
                ));
            }
            let detuning = 1.0 - m.omega;
            frequencies.push(m.omega);
            weights.push(m.g * m.g / (detuning * detuning));
        }
        Ok(Self { frequencies, weights })
    }

    pub fn total(&self) -> f64 {
        crate::summation::sum(self.weights.iter().copied())
    }

    pub fn is_perturbative(&self) -> bool {
        self.total() <= PERTURBATIVE_LIMIT
    }

    /// `Σ w_λ e^{-i(ω_λ-1)t}`.
    pub fn partial_sum(&self, t: f64) -> Complex64 {
        let mut acc = CompensatedComplexSum::new();
        for (&w, &f) in self.weights.iter().zip(&self.frequencies) {
            let (s, c) = reduced_phase(f - 1.0, t).sin_cos();
            acc.add(Complex64::new(w * c, -w * s));
        }
        acc.value()
    }
}

/// `N = (1 + Σ w_λ)²`.
pub fn norm_n(weights: &OffshellWeights) -> f64 {
    let s = 1.0 + weights.total();
    s * s
}

/// Exact comb plus first-order off-shell modes.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel {
    pub comb: SpectralDecomposition,
    pub offshell: OffshellWeights,
    pub sqrt_n: f64,
    amplitudes: Vec<f64>,
    frequencies: Vec<f64>,
}

impl HybridModel {
    pub fn new(comb: SpectralDecomposition, offshell: OffshellWeights) -> Self {
        let total = offshell.total();
        if total > PERTURBATIVE_LIMIT {
            log::warn!("off-shell weights sum to {total:.3e}; first-order treatment may be invalid");
        }
        // Ascending frequency order, comb eigenfrequencies merged with off-shell detunings.
        let mut terms: Vec<(f64, f64)> = comb
            .eigenfrequencies
            .iter()
            .zip(comb.excited_weights())
            .map(|(&f, p)| (f, p))
            .chain(offshell.frequencies.iter().zip(&offshell.weights).map(|(&f, &w)| (f - 1.0, w)))
            .filter(|(_, a)| *a != 0.0)
            .collect();
        terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            comb,
            offshell,
            sqrt_n: 1.0 + total,
            frequencies: terms.iter().map(|t| t.0).collect(),
            amplitudes: terms.iter().map(|t| t.1).collect(),
        }
    }

    pub fn from_ladder(ladder: &ModeLadder) -> Result<Self> {
        let comb = diagonalize(&ArrowheadHamiltonian::assemble(ladder)?)?;
        Ok(Self::new(comb, OffshellWeights::from_ladder(ladder)?))
    }

    pub fn norm(&self) -> f64 {
        self.sqrt_n * self.sqrt_n
    }

    /// Decay probability `1 - P(t)` at one reduced time.
    pub fn decay_probability(&self, t: f64) -> f64 {
        let theta: Vec<f64> = self.frequencies.iter().map(|&f| reduced_phase(f, t)).collect();
        let a = &self.amplitudes;
        let mut acc = CompensatedSum::new();
        for j in 0..a.len() {
            let mut row = CompensatedSum::new();
            for k in j + 1..a.len() {
                let s = (0.5 * (theta[j] - theta[k])).sin();
                row.add(a[k] * s * s);
            }
            acc.add(a[j] * row.value());
        }
        4.0 * acc.value() / self.norm()
    }
}

/// Hybrid survival probability on a grid of reduced times.
pub fn perturbed_survival(model: &HybridModel, times: &[f64], exec: Execution) -> Vec<f64> {
    exec.map(times, |&t| 1.0 - model.decay_probability(t))
}

/// All-perturbative survival `1 - 4Σ w_λ sin²((1-ω_λ)t/2)` over every mode of
/// the ladder, comb included.
pub fn perturbed_first_order_check(ladder: &ModeLadder, times: &[f64], exec: Execution) -> Vec<f64> {
    exec.map(times, |&t| {
        let mut acc = CompensatedSum::new();
        for m in &ladder.modes {
            // 4(g/δ)² sin²(δt/2) written as (gt)² sinc²(δt/2) to stay finite at δ = 0.
            let x = 0.5 * (1.0 - m.omega) * t;
            acc.add((m.g * t).powi(2) * crate::quadrature::sincsq(x));
        }
        1.0 - acc.value()
    })
}
