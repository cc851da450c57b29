//! Energy-slice mode ladder.
//!
//! A slice `[ω_lo, ω_hi]` of the continuum is replaced by one effective mode
//! with squared coupling `g² = (Γ̃/2π)·∫ ẽnv dω̃` over the slice and frequency
//! equal to the envelope-weighted mean. Both are computed in reduced units.

use std::f64::consts::PI;
use std::fmt;

use crate::coupling::{CouplingModel, ReducedModel};
use crate::error::{invalid, Error, Result};
use crate::units::{reduced_decay_rate, AtomTransition, PhysicalConstants};

/// Slice of wavenumbers in SI units (1/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySlice {
    pub k_lo: f64,
    pub k_hi: f64,
}

impl EnergySlice {
    pub fn to_reduced(self, atom: &AtomTransition, consts: &PhysicalConstants) -> Slice {
        let s = consts.c / atom.omega_eg;
        Slice {
            lo: self.k_lo * s,
            hi: self.k_hi * s,
        }
    }
}

/// Slice of reduced frequencies `ω/ω_eg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slice {
    pub lo: f64,
    pub hi: f64,
}

impl Slice {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, w: f64) -> bool {
        self.lo <= w && w <= self.hi
    }

    pub fn to_si(self, atom: &AtomTransition, consts: &PhysicalConstants) -> EnergySlice {
        let s = atom.omega_eg / consts.c;
        EnergySlice {
            k_lo: self.lo * s,
            k_hi: self.hi * s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Comb,
    OffshellAbove,
    OffshellBelow,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Self::Comb => "comb",
            Self::OffshellAbove => "offshell_above",
            Self::OffshellBelow => "offshell_below",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Quasiresonant comb, in reduced units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombSpec {
    pub n_comb: usize,
    pub delta_omega: f64,
    pub center: f64,
}

impl CombSpec {
    pub const DEFAULT_MODES: usize = 100;
    pub const DEFAULT_WIDTH_IN_GAMMA: f64 = 16.0;

    /// 100 modes over 16Γ centred on resonance.
    pub fn standard(gamma: f64) -> Self {
        Self::with_width(Self::DEFAULT_MODES, Self::DEFAULT_WIDTH_IN_GAMMA, gamma)
    }

    pub fn with_width(n_comb: usize, width_in_gamma: f64, gamma: f64) -> Self {
        Self {
            n_comb,
            delta_omega: width_in_gamma * gamma,
            center: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_comb < 1 {
            return Err(invalid("n_comb", "must be at least 1"));
        }
        if !(self.delta_omega > 0.0 && self.delta_omega.is_finite()) {
            return Err(invalid("delta_omega", format!("must be positive, got {}", self.delta_omega)));
        }
        if !(self.center - 0.5 * self.delta_omega > 0.0) {
            return Err(invalid("center", "comb lower edge must be positive"));
        }
        Ok(())
    }

    pub fn lower_edge(&self) -> f64 {
        self.boundary(0)
    }

    pub fn upper_edge(&self) -> f64 {
        self.boundary(self.n_comb)
    }

    // Each boundary is computed directly so neighbouring slices share it exactly.
    fn boundary(&self, j: usize) -> f64 {
        self.center + self.delta_omega * (j as f64 / self.n_comb as f64 - 0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// Off-shell grid above (and optionally below) the comb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffshellSpec {
    pub n_offshell: usize,
    pub k_max_factor: f64,
    pub spacing: Spacing,
    pub include_below_comb: bool,
    /// Linear slices between zero frequency and the comb's lower edge.
    pub n_below: usize,
}

impl Default for OffshellSpec {
    fn default() -> Self {
        Self {
            n_offshell: 100,
            k_max_factor: 10.0,
            spacing: Spacing::Logarithmic,
            include_below_comb: true,
            n_below: 10,
        }
    }
}

impl OffshellSpec {
    pub fn none() -> Self {
        Self {
            n_offshell: 0,
            include_below_comb: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_max_factor > 1.0) {
            return Err(invalid("k_max_factor", format!("must exceed 1, got {}", self.k_max_factor)));
        }
        Ok(())
    }
}

/// One effective mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub slice: Slice,
    /// Effective frequency `ω_eff/ω_eg`.
    pub omega: f64,
    /// Effective coupling `G/ω_eg`.
    pub g: f64,
    pub region: Region,
}

impl Mode {
    pub fn detuning(&self) -> f64 {
        self.omega - 1.0
    }
}

/// Modes sorted by frequency: below-comb, comb, above-comb.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeLadder {
    pub modes: Vec<Mode>,
    pub comb_count: usize,
    pub offshell_count: usize,
}

impl ModeLadder {
    pub fn build(
        model: &ReducedModel,
        gamma: f64,
        comb: &CombSpec,
        offshell: &OffshellSpec,
    ) -> Result<Self> {
        let comb_slices = build_comb_slices(comb)?;
        let off = build_offshell_slices(offshell, comb.lower_edge(), comb.upper_edge(), model)?;
        let mut tagged: Vec<(Slice, Region)> = off
            .iter()
            .copied()
            .filter(|(_, r)| *r == Region::OffshellBelow)
            .collect();
        tagged.extend(comb_slices.iter().map(|s| (*s, Region::Comb)));
        tagged.extend(off.iter().copied().filter(|(_, r)| *r == Region::OffshellAbove));

        let modes = tagged
            .into_iter()
            .map(|(slice, region)| {
                Ok(Mode {
                    slice,
                    omega: effective_frequency(&slice, model)?,
                    g: effective_coupling(&slice, model, gamma)?,
                    region,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let ladder = Self {
            modes,
            comb_count: comb_slices.len(),
            offshell_count: off.len(),
        };
        ladder.check_invariants()?;
        Ok(ladder)
    }

    /// Builds the ladder for an SI model and emitter.
    pub fn for_atom(
        model: &CouplingModel,
        atom: &AtomTransition,
        consts: &PhysicalConstants,
        comb: &CombSpec,
        offshell: &OffshellSpec,
    ) -> Result<Self> {
        let reduced = ReducedModel::new(model, atom, consts)?;
        Self::build(&reduced, reduced_decay_rate(atom, consts), comb, offshell)
    }

    pub fn comb_modes(&self) -> impl Iterator<Item = &Mode> {
        self.modes.iter().filter(|m| m.region == Region::Comb)
    }

    pub fn offshell_modes(&self) -> impl Iterator<Item = &Mode> {
        self.modes.iter().filter(|m| m.region != Region::Comb)
    }

    fn check_invariants(&self) -> Result<()> {
        for pair in self.modes.windows(2) {
            if pair[1].slice.lo < pair[0].slice.hi {
                return Err(Error::Internal(format!(
                    "slices overlap: [{}, {}] and [{}, {}]",
                    pair[0].slice.lo, pair[0].slice.hi, pair[1].slice.lo, pair[1].slice.hi
                )));
            }
        }
        for m in &self.modes {
            if !(m.g >= 0.0) || !(m.omega >= m.slice.lo && m.omega <= m.slice.hi) {
                return Err(Error::Internal(format!("invalid mode {m:?}")));
            }
        }
        Ok(())
    }
}

/// `n_comb` contiguous equal-width slices tiling the comb interval.
pub fn build_comb_slices(spec: &CombSpec) -> Result<Vec<Slice>> {
    spec.validate()?;
    Ok((0..spec.n_comb)
        .map(|j| Slice {
            lo: spec.boundary(j),
            hi: spec.boundary(j + 1),
        })
        .collect())
}

/// Off-shell slices from the comb's upper edge to `k_max_factor` times the
/// model cutoff (`K_C` for truncated kinds, `k_X` otherwise), plus the
/// optional linear grid below the comb.
pub fn build_offshell_slices(
    spec: &OffshellSpec,
    comb_lo: f64,
    comb_hi: f64,
    model: &ReducedModel,
) -> Result<Vec<(Slice, Region)>> {
    spec.validate()?;
    let mut out = Vec::new();
    if spec.include_below_comb && spec.n_below > 0 {
        let n = spec.n_below;
        let edge = |j: usize| if j == n { comb_lo } else { comb_lo * j as f64 / n as f64 };
        out.extend((0..n).map(|j| {
            (
                Slice {
                    lo: edge(j),
                    hi: edge(j + 1),
                },
                Region::OffshellBelow,
            )
        }));
    }
    if spec.n_offshell > 0 {
        let reference = if model.kind.is_truncated() {
            model.omega_cut.ok_or(Error::CutoffRequired {
                kind: model.kind.name(),
            })?
        } else {
            model.omega_x
        };
        let top = spec.k_max_factor * reference;
        if !(top > comb_hi) {
            return Err(invalid(
                "k_max_factor",
                format!("off-shell grid top {top} does not exceed the comb edge {comb_hi}"),
            ));
        }
        let n = spec.n_offshell;
        let ratio = top / comb_hi;
        let edge = |j: usize| {
            if j == 0 {
                comb_hi
            } else if j == n {
                top
            } else {
                let f = j as f64 / n as f64;
                match spec.spacing {
                    Spacing::Logarithmic => comb_hi * ratio.powf(f),
                    Spacing::Linear => comb_hi + (top - comb_hi) * f,
                }
            }
        };
        out.extend((0..n).map(|j| {
            (
                Slice {
                    lo: edge(j),
                    hi: edge(j + 1),
                },
                Region::OffshellAbove,
            )
        }));
    }
    for (s, _) in &out {
        if s.hi > comb_lo && s.lo < comb_hi {
            return Err(Error::Internal(format!(
                "off-shell slice [{}, {}] overlaps the comb",
                s.lo, s.hi
            )));
        }
    }
    Ok(out)
}

/// Reduced coupling `g = sqrt((Γ̃/2π)·∫ ẽnv)` of a slice. Zero when degenerate.
pub fn effective_coupling(slice: &Slice, model: &ReducedModel, gamma: f64) -> Result<f64> {
    if !(slice.hi > slice.lo) {
        return Ok(0.0);
    }
    let w = model.weight(slice.lo, slice.hi)?;
    Ok((gamma / (2.0 * PI) * w).max(0.0).sqrt())
}

/// Envelope-weighted mean frequency of a slice (reduced).
pub fn effective_frequency(slice: &Slice, model: &ReducedModel) -> Result<f64> {
    model.mean_frequency(slice.lo, slice.hi)
}

/// Effective coupling `G` (rad/s) of an SI slice.
pub fn effective_coupling_si(
    slice: &EnergySlice,
    model: &CouplingModel,
    atom: &AtomTransition,
    consts: &PhysicalConstants,
) -> Result<f64> {
    let reduced = ReducedModel::new(model, atom, consts)?;
    let g = effective_coupling(
        &slice.to_reduced(atom, consts),
        &reduced,
        reduced_decay_rate(atom, consts),
    )?;
    Ok(g * atom.omega_eg)
}

/// Effective frequency (rad/s) of an SI slice.
pub fn effective_frequency_si(
    slice: &EnergySlice,
    model: &CouplingModel,
    atom: &AtomTransition,
    consts: &PhysicalConstants,
) -> Result<f64> {
    let reduced = ReducedModel::new(model, atom, consts)?;
    Ok(effective_frequency(&slice.to_reduced(atom, consts), &reduced)? * atom.omega_eg)
}
