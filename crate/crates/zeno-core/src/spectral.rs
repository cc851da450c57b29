//! Exact dynamics of the excited state coupled to the comb.
//!
//! In the frame rotating at `ω_eg` the Hamiltonian is a real symmetric
//! arrowhead matrix
//!
//! ```text
//! [ 0   z₁  z₂ … ]
//! [ z₁  d₁       ]
//! [ z₂      d₂   ]
//! [ ⋮          ⋱ ]
//! ```
//!
//! with `d` the mode detunings and `z` the couplings. Its eigenvalues are the
//! roots of `f(λ) = λ - Σ zᵢ²/(λ - dᵢ)`, one below `d₁`, one between each
//! pair of poles and one above `d_n`. Each root is located relative to its
//! nearest pole, and the couplings are then recomputed from the computed
//! roots (Löwner's formula) so that the eigenvectors come out orthogonal to
//! working precision.

use num_complex::Complex64;

use crate::discretization::{ModeLadder, Region};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::phase::cis_phase;
use crate::summation::{CompensatedComplexSum, CompensatedSum};

/// Real arrowhead Hamiltonian in reduced units, modes sorted by detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrowheadHamiltonian {
    pub detunings: Vec<f64>,
    pub couplings: Vec<f64>,
}

impl ArrowheadHamiltonian {
    /// Sorts the modes by detuning. Couplings enter through their modulus,
    /// which a diagonal phase change of the mode basis always achieves.
    pub fn new(detunings: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if detunings.len() != couplings.len() {
            return Err(invalid(
                "couplings",
                format!("{} couplings for {} detunings", couplings.len(), detunings.len()),
            ));
        }
        if detunings.is_empty() {
            return Err(Error::EmptyComb);
        }
        if detunings.iter().chain(&couplings).any(|x| !x.is_finite()) {
            return Err(invalid("arrowhead", "entries must be finite"));
        }
        let mut pairs: Vec<(f64, f64)> = detunings.into_iter().zip(couplings.into_iter().map(f64::abs)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            detunings: pairs.iter().map(|p| p.0).collect(),
            couplings: pairs.iter().map(|p| p.1).collect(),
        })
    }

    /// The comb part of a ladder.
    pub fn assemble(ladder: &ModeLadder) -> Result<Self> {
        let comb: Vec<_> = ladder.modes.iter().filter(|m| m.region == Region::Comb).collect();
        Self::new(comb.iter().map(|m| m.detuning()).collect(), comb.iter().map(|m| m.g).collect())
    }

    pub fn n_modes(&self) -> usize {
        self.detunings.len()
    }

    /// Dimension of the matrix, `n_modes + 1`.
    pub fn dim(&self) -> usize {
        self.n_modes() + 1
    }

    /// `H·v` for a vector of length `dim`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        let mut head = CompensatedSum::new();
        for (i, (&d, &z)) in self.detunings.iter().zip(&self.couplings).enumerate() {
            head.add(z * v[i + 1]);
            out[i + 1] = z * v[0] + d * v[i + 1];
        }
        out[0] = head.value();
        out
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let d2: f64 = self.detunings.iter().map(|d| d * d).sum();
        let z2: f64 = self.couplings.iter().map(|z| z * z).sum();
        (d2 + 2.0 * z2).sqrt()
    }

    /// Dense row-major copy, for diagnostics and tests.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut m = vec![0.0; n * n];
        for i in 0..self.n_modes() {
            m[i + 1] = self.couplings[i];
            m[(i + 1) * n] = self.couplings[i];
            m[(i + 1) * n + i + 1] = self.detunings[i];
        }
        m
    }
}

/// Eigenfrequencies (ascending) and eigenvectors of an arrowhead Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenfrequencies: Vec<f64>,
    /// Row `i` holds eigenvector `i`; column 0 is the excited-state component.
    amplitudes: Vec<f64>,
    mode_detunings: Vec<f64>,
    mode_couplings: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenfrequencies.len()
    }

    pub fn n_modes(&self) -> usize {
        self.dim() - 1
    }

    pub fn eigenvector(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.amplitudes[i * n..(i + 1) * n]
    }

    /// `ε^i_col`.
    pub fn amplitude(&self, i: usize, col: usize) -> f64 {
        self.amplitudes[i * self.dim() + col]
    }

    /// Overlaps `|ε^i_0|²` of the excited state with each eigenstate.
    pub fn excited_weights(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.amplitude(i, 0).powi(2)).collect()
    }

    pub fn mode_detunings(&self) -> &[f64] {
        &self.mode_detunings
    }

    pub fn mode_couplings(&self) -> &[f64] {
        &self.mode_couplings
    }
}

/// Diagonalizes an arrowhead Hamiltonian.
pub fn diagonalize(h: &ArrowheadHamiltonian) -> Result<SpectralDecomposition> {
    let n = h.n_modes();
    let dim = n + 1;
    let scale = h
        .detunings
        .iter()
        .map(|d| d.abs())
        .fold(0.0f64, f64::max)
        .max(h.couplings.iter().map(|z| z * z).sum::<f64>().sqrt());
    if scale == 0.0 {
        let mut amplitudes = vec![0.0; dim * dim];
        for i in 0..dim {
            amplitudes[i * dim + i] = 1.0;
        }
        return Ok(SpectralDecomposition {
            eigenfrequencies: vec![0.0; dim],
            amplitudes,
            mode_detunings: h.detunings.clone(),
            mode_couplings: h.couplings.clone(),
        });
    }
    let tol = 8.0 * f64::EPSILON * scale;

    // Working basis of the mode block; each entry is a sparse combination of
    // original modes with its own diagonal value and coupling.
    struct Basis {
        combo: Vec<(usize, f64)>,
        d: f64,
        z: f64,
    }
    let mut active: Vec<Basis> = Vec::with_capacity(n);
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim);
    let mut push_deflated = |d: f64, combo: &[(usize, f64)]| {
        let mut v = vec![0.0; dim];
        for &(j, c) in combo {
            v[j + 1] += c;
        }
        pairs.push((d, v));
    };

    for i in 0..n {
        let b = Basis {
            combo: vec![(i, 1.0)],
            d: h.detunings[i],
            z: h.couplings[i],
        };
        if b.z <= tol {
            push_deflated(b.d, &b.combo);
            continue;
        }
        match active.last_mut() {
            Some(prev) if b.d - prev.d <= tol => {
                // Rotate the nearly degenerate pair so only one member couples.
                let r = prev.z.hypot(b.z);
                let (c, s) = (prev.z / r, b.z / r);
                let mut merged = Vec::with_capacity(prev.combo.len() + 1);
                let mut orphan = Vec::with_capacity(prev.combo.len() + 1);
                for &(j, a) in &prev.combo {
                    merged.push((j, c * a));
                    orphan.push((j, -s * a));
                }
                merged.push((i, s));
                orphan.push((i, c));
                let d_merged = c * c * prev.d + s * s * b.d;
                let d_orphan = s * s * prev.d + c * c * b.d;
                push_deflated(d_orphan, &orphan);
                *prev = Basis {
                    combo: merged,
                    d: d_merged,
                    z: r,
                };
            }
            _ => active.push(b),
        }
    }

    let d: Vec<f64> = active.iter().map(|b| b.d).collect();
    let z: Vec<f64> = active.iter().map(|b| b.z).collect();
    let m = d.len();
    if m == 0 {
        pairs.push((0.0, unit(dim, 0)));
    } else {
        let roots = secular_roots(&d, &z)?;
        let zhat = lowner_couplings(&d, &roots);
        for root in &roots {
            let mut comp = Vec::with_capacity(m + 1);
            comp.push(1.0);
            for i in 0..m {
                comp.push(zhat[i] / root.minus(d[i]));
            }
            let norm = comp.iter().map(|c| c * c).sum::<f64>().sqrt();
            let mut v = vec![0.0; dim];
            v[0] = comp[0] / norm;
            for (i, b) in active.iter().enumerate() {
                let coef = comp[i + 1] / norm;
                for &(j, a) in &b.combo {
                    v[j + 1] += coef * a;
                }
            }
            pairs.push((root.value(), v));
        }
    }

    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut amplitudes = Vec::with_capacity(dim * dim);
    let mut eigenfrequencies = Vec::with_capacity(dim);
    for (lambda, v) in pairs {
        // Fix the sign so the excited component is nonnegative.
        let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
        eigenfrequencies.push(lambda);
        amplitudes.extend(v.iter().map(|x| sign * x));
    }
    let decomp = SpectralDecomposition {
        eigenfrequencies,
        amplitudes,
        mode_detunings: h.detunings.clone(),
        mode_couplings: h.couplings.clone(),
    };
    let residual = max_residual(h, &decomp);
    let spectral_norm = decomp
        .eigenfrequencies
        .iter()
        .map(|x| x.abs())
        .fold(0.0f64, f64::max);
    if residual > 1e-12 * spectral_norm {
        return Err(Error::Eigen { residual });
    }
    Ok(decomp)
}

fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

/// Largest `‖Hv - λv‖` over all eigenpairs.
pub fn max_residual(h: &ArrowheadHamiltonian, decomp: &SpectralDecomposition) -> f64 {
    (0..decomp.dim())
        .map(|i| {
            let v = decomp.eigenvector(i);
            let hv = h.apply(v);
            let lambda = decomp.eigenfrequencies[i];
            hv.iter()
                .zip(v)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// A root stored as `origin + tau`, where `origin` is one of the poles.
#[derive(Debug, Clone, Copy)]
struct Root {
    origin: f64,
    tau: f64,
}

impl Root {
    fn value(&self) -> f64 {
        self.origin + self.tau
    }

    /// `λ - d` without cancellation when `d` is the origin pole or close to it.
    fn minus(&self, d: f64) -> f64 {
        (self.origin - d) + self.tau
    }
}

/// All `m + 1` roots of `λ - Σ zᵢ²/(λ - dᵢ)` for strictly increasing `d`
/// and positive `z`.
fn secular_roots(d: &[f64], z: &[f64]) -> Result<Vec<Root>> {
    let m = d.len();
    let znorm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut roots = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let (origin_idx, lo, hi) = if k == 0 {
            (0, d[0].min(0.0) - znorm - d[0], 0.0)
        } else if k == m {
            (m - 1, 0.0, d[m - 1].max(0.0) + znorm - d[m - 1])
        } else {
            let mid = 0.5 * (d[k - 1] + d[k]);
            if secular(d, z, 0.0, mid) >= 0.0 {
                (k - 1, 0.0, mid - d[k - 1])
            } else {
                (k, mid - d[k], 0.0)
            }
        };
        let origin = d[origin_idx];
        let tau = solve_shifted(d, z, origin, lo, hi)?;
        roots.push(Root { origin, tau });
    }
    Ok(roots)
}

/// `f(origin + tau)` with every pole distance formed as `(dᵢ - origin)`
/// subtracted from `tau`.
fn secular(d: &[f64], z: &[f64], origin: f64, tau: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.add(origin);
    acc.add(tau);
    for (di, zi) in d.iter().zip(z) {
        acc.add(-zi * zi / (tau - (di - origin)));
    }
    acc.value()
}

fn secular_derivative(d: &[f64], z: &[f64], origin: f64, tau: f64) -> f64 {
    1.0 + d
        .iter()
        .zip(z)
        .map(|(di, zi)| {
            let r = zi / (tau - (di - origin));
            r * r
        })
        .sum::<f64>()
}

/// Safeguarded Newton iteration for the root of the increasing function
/// `tau ↦ f(origin + tau)` inside `(lo, hi)`.
fn solve_shifted(d: &[f64], z: &[f64], origin: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..500 {
        let f = secular(d, z, origin, tau);
        if f == 0.0 {
            return Ok(tau);
        }
        if f > 0.0 {
            hi = tau;
        } else {
            lo = tau;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            return Ok(0.5 * (lo + hi));
        }
        let step = f / secular_derivative(d, z, origin, tau);
        let newton = tau - step;
        tau = if newton > lo && newton < hi && step.abs() < 0.5 * (hi - lo) {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if tau == lo || tau == hi {
            return Ok(tau);
        }
    }
    Err(Error::Convergence {
        what: "secular equation",
        value: origin + tau,
        achieved: hi - lo,
    })
}

/// Couplings for which the computed roots are exact eigenvalues:
/// `ẑᵢ² = Π_j |λ_j - dᵢ| / Π_{j≠i} |d_j - dᵢ|`.
fn lowner_couplings(d: &[f64], roots: &[Root]) -> Vec<f64> {
    let m = d.len();
    (0..m)
        .map(|i| {
            let mut prod = roots[i].minus(d[i]).abs() * roots[m].minus(d[i]).abs();
            for j in 0..m {
                if j == i {
                    continue;
                }
                // Pair the root just below pole j with pole j; the ratio stays O(1).
                prod *= roots[j].minus(d[i]).abs() / (d[j] - d[i]).abs();
            }
            prod.sqrt()
        })
        .collect()
}

/// Survival curve, optionally with every mode occupation.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    /// Reduced times `t·ω_eg`.
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    /// `occupations[k][λ]` at `times[k]`.
    pub occupations: Option<Vec<Vec<f64>>>,
}

/// Excited-state amplitude `Σᵢ |εⁱ₀|² e^{-iωᵢt}`, summed in ascending ωᵢ.
pub fn excited_amplitude(decomp: &SpectralDecomposition, t: f64) -> Complex64 {
    let mut acc = CompensatedComplexSum::new();
    for (i, &w) in decomp.eigenfrequencies.iter().enumerate() {
        let p = decomp.amplitude(i, 0).powi(2);
        let (c, s) = cis_phase(w, t);
        acc.add(Complex64::new(p * c, -p * s));
    }
    acc.value()
}

/// Mode amplitudes `Σᵢ εⁱ_λ εⁱ₀ e^{-iωᵢt}` for every mode.
pub fn mode_amplitudes(decomp: &SpectralDecomposition, t: f64) -> Vec<Complex64> {
    let n = decomp.n_modes();
    let mut acc = vec![CompensatedComplexSum::new(); n];
    for (i, &w) in decomp.eigenfrequencies.iter().enumerate() {
        let e0 = decomp.amplitude(i, 0);
        if e0 == 0.0 {
            continue;
        }
        let (c, s) = cis_phase(w, t);
        let row = decomp.eigenvector(i);
        for (lambda, a) in acc.iter_mut().enumerate() {
            let q = row[lambda + 1] * e0;
            a.add(Complex64::new(q * c, -q * s));
        }
    }
    acc.iter().map(|a| a.value()).collect()
}

/// Evaluates the survival probability (and optionally occupations) on a grid.
pub fn evolve(
    decomp: &SpectralDecomposition,
    times: &[f64],
    with_occupations: bool,
    exec: Execution,
) -> Result<DecayCurve> {
    check_times(times)?;
    let rows = exec.map(times, |&t| {
        let survival = excited_amplitude(decomp, t).norm_sqr();
        let occ = with_occupations.then(|| mode_amplitudes(decomp, t).iter().map(|a| a.norm_sqr()).collect());
        (survival, occ)
    });
    let survival = rows.iter().map(|r| r.0).collect();
    let occupations = with_occupations.then(|| rows.into_iter().map(|r| r.1.unwrap_or_default()).collect());
    Ok(DecayCurve {
        times: times.to_vec(),
        survival,
        occupations,
    })
}

/// `|c_{g,λ}(t)|²` of one mode.
pub fn mode_occupation(
    decomp: &SpectralDecomposition,
    lambda: usize,
    times: &[f64],
    exec: Execution,
) -> Result<Vec<f64>> {
    if lambda >= decomp.n_modes() {
        return Err(Error::IndexOutOfRange {
            index: lambda,
            len: decomp.n_modes(),
        });
    }
    check_times(times)?;
    Ok(exec.map(times, |&t| {
        let mut acc = CompensatedComplexSum::new();
        for (i, &w) in decomp.eigenfrequencies.iter().enumerate() {
            let q = decomp.amplitude(i, lambda + 1) * decomp.amplitude(i, 0);
            let (c, s) = cis_phase(w, t);
            acc.add(Complex64::new(q * c, -q * s));
        }
        acc.value().norm_sqr()
    }))
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(invalid("times", "must be finite and nonnegative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "must be ascending"));
    }
    Ok(())
}

/// Recurrence time estimate `2π/δω` (reduced), with `δω` the mean spacing of
/// the bare comb detunings.
pub fn recurrence_time(decomp: &SpectralDecomposition) -> Result<f64> {
    let d = decomp.mode_detunings();
    if d.len() < 2 {
        return Err(invalid("n_comb", "a recurrence estimate needs at least two modes"));
    }
    let spacing = (d[d.len() - 1] - d[0]) / (d.len() - 1) as f64;
    Ok(2.0 * std::f64::consts::PI / spacing)
}

/// First time the survival climbs back above `rise` after dropping below `fall`.
pub fn first_revival(times: &[f64], survival: &[f64], fall: f64, rise: f64) -> Option<f64> {
    let mut dropped = false;
    for (&t, &p) in times.iter().zip(survival) {
        if p < fall {
            dropped = true;
        } else if dropped && p > rise {
            return Some(t);
        }
    }
    None
}
