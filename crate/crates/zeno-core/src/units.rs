//! Physical constants, the emitter, and the scales derived from them.
//!
//! Everything downstream works in reduced units with `ω_eg = 1`: a
//! frequency `ω` is stored as `ω/ω_eg` and a time `t` as `t·ω_eg`.

use std::f64::consts::PI;

use crate::coupling::{CouplingKind, CouplingModel, ReducedModel};
use crate::error::{invalid, Result};

/// SI constants. Defaults are CODATA 2018.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub epsilon0: f64,
    pub e_charge: f64,
    pub a0: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

impl PhysicalConstants {
    pub const CODATA_2018: Self = Self {
        hbar: 1.054_571_817e-34,
        c: 299_792_458.0,
        epsilon0: 8.854_187_812_8e-12,
        e_charge: 1.602_176_634e-19,
        a0: 5.291_772_109_03e-11,
    };

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hbar", self.hbar),
            ("c", self.c),
            ("epsilon0", self.epsilon0),
            ("e_charge", self.e_charge),
            ("a0", self.a0),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Two-level emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomTransition {
    /// Transition angular frequency (rad/s).
    pub omega_eg: f64,
    /// Dipole matrix element magnitude (C·m). Zero means an uncoupled atom.
    pub d_ge: f64,
    /// Nuclear charge.
    pub z: u32,
}

impl Default for AtomTransition {
    fn default() -> Self {
        Self::hydrogen_2p_1s()
    }
}

impl AtomTransition {
    pub fn hydrogen_2p_1s() -> Self {
        Self {
            omega_eg: 1.55e16,
            d_ge: 6.31e-30,
            z: 1,
        }
    }

    pub fn new(omega_eg: f64, d_ge: f64, z: u32) -> Result<Self> {
        let atom = Self { omega_eg, d_ge, z };
        atom.validate()?;
        Ok(atom)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_eg > 0.0 && self.omega_eg.is_finite()) {
            return Err(invalid("omega_eg", format!("must be positive, got {}", self.omega_eg)));
        }
        if !(self.d_ge >= 0.0 && self.d_ge.is_finite()) {
            return Err(invalid("d_ge", format!("must be nonnegative, got {}", self.d_ge)));
        }
        if self.z < 1 {
            return Err(invalid("Z", "must be at least 1"));
        }
        Ok(())
    }

    /// Converts seconds to reduced time.
    pub fn reduce_time(&self, t_seconds: f64) -> f64 {
        t_seconds * self.omega_eg
    }

    /// Converts reduced time to seconds.
    pub fn seconds(&self, t_reduced: f64) -> f64 {
        t_reduced / self.omega_eg
    }
}

/// Spontaneous decay rate Γ = ω_eg³d²/(3πħε₀c³) in 1/s.
pub fn derive_decay_rate(atom: &AtomTransition, consts: &PhysicalConstants) -> f64 {
    let w = atom.omega_eg;
    w * w * w * atom.d_ge * atom.d_ge / (3.0 * PI * consts.hbar * consts.epsilon0 * consts.c.powi(3))
}

/// Γ/ω_eg.
pub fn reduced_decay_rate(atom: &AtomTransition, consts: &PhysicalConstants) -> f64 {
    derive_decay_rate(atom, consts) / atom.omega_eg
}

/// Rates, cutoffs and characteristic times of an emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    pub gamma: f64,
    pub k_c: f64,
    pub omega_c: f64,
    pub omega_x: f64,
    pub tau_x: f64,
    pub tau_e: f64,
}

impl DerivedScales {
    pub fn k_x(&self, consts: &PhysicalConstants) -> f64 {
        self.omega_x / consts.c
    }
}

/// Populates the cutoff scales. `K_C = 2eπ/d` is infinite for `d = 0`.
pub fn derive_cutoffs(atom: &AtomTransition, consts: &PhysicalConstants) -> DerivedScales {
    let gamma = derive_decay_rate(atom, consts);
    let k_c = 2.0 * consts.e_charge * PI / atom.d_ge;
    let omega_x = 1.5 * consts.c / consts.a0;
    DerivedScales {
        gamma,
        k_c,
        omega_c: consts.c * k_c,
        omega_x,
        tau_x: 1.0 / omega_x,
        tau_e: 1.0 / gamma,
    }
}

/// Zeno time τ_Z, defined by `P_decay(t) → (t/τ_Z)²` as `t → 0`.
///
/// Returns `f64::INFINITY` for an uncoupled atom.
pub fn zeno_time(
    model: &CouplingModel,
    atom: &AtomTransition,
    consts: &PhysicalConstants,
) -> Result<f64> {
    let reduced = ReducedModel::new(model, atom, consts)?;
    let weight = reduced.total_weight()?;
    let gamma = reduced_decay_rate(atom, consts);
    if gamma == 0.0 {
        return Ok(f64::INFINITY);
    }
    let rate_sq = gamma / (2.0 * PI) * weight;
    Ok(1.0 / (atom.omega_eg * rate_sq.sqrt()))
}

/// Pure ratio arithmetic for hydrogen-like emitters of charge Z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZScaling {
    pub tau_z: f64,
    pub tau_x: f64,
    pub tau_x_over_tau_z: f64,
    pub tau_z_over_tau_e: f64,
}

pub fn z_scaling(z: u32) -> Result<ZScaling> {
    if z < 1 {
        return Err(invalid("Z", "must be at least 1"));
    }
    let z = f64::from(z);
    Ok(ZScaling {
        tau_z: z.powi(-2),
        tau_x: 1.0 / z,
        tau_x_over_tau_z: z,
        tau_z_over_tau_e: z * z,
    })
}

/// Default coupling model for `kind` on this emitter.
pub fn standard_model(
    kind: CouplingKind,
    atom: &AtomTransition,
    consts: &PhysicalConstants,
) -> CouplingModel {
    CouplingModel::standard(kind, &derive_cutoffs(atom, consts), consts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hydrogen_timescales() {
        let atom = AtomTransition::hydrogen_2p_1s();
        let c = PhysicalConstants::default();
        let s = derive_cutoffs(&atom, &c);
        assert!((1.0 / s.gamma / 1.60e-9 - 1.0).abs() < 5e-3);
        assert!((1.0 / s.omega_c / 2.09e-20 - 1.0).abs() < 5e-3);
        assert!((s.tau_x / 1.18e-19 - 1.0).abs() < 5e-3);
        assert!(s.tau_e > 1.0 / atom.omega_eg && 1.0 / atom.omega_eg > s.tau_x);
    }

    #[test]
    fn rate_scaling() {
        let c = PhysicalConstants::default();
        let a = AtomTransition::hydrogen_2p_1s();
        let g = derive_decay_rate(&a, &c);
        let d2 = AtomTransition { d_ge: 2.0 * a.d_ge, ..a };
        assert_relative_eq!(derive_decay_rate(&d2, &c), 4.0 * g, max_relative = 1e-14);
        let w2 = AtomTransition { omega_eg: 2.0 * a.omega_eg, ..a };
        assert_relative_eq!(derive_decay_rate(&w2, &c), 8.0 * g, max_relative = 1e-14);
        let d0 = AtomTransition { d_ge: 0.0, ..a };
        assert_eq!(derive_decay_rate(&d0, &c), 0.0);
    }

    #[test]
    fn halving_bohr_radius_doubles_omega_x() {
        let atom = AtomTransition::hydrogen_2p_1s();
        let c = PhysicalConstants::default();
        let half = PhysicalConstants { a0: c.a0 / 2.0, ..c };
        assert_relative_eq!(
            derive_cutoffs(&atom, &half).omega_x,
            2.0 * derive_cutoffs(&atom, &c).omega_x,
            max_relative = 1e-15
        );
    }

    #[test]
    fn zeno_time_closed_forms() {
        let atom = AtomTransition::hydrogen_2p_1s();
        let c = PhysicalConstants::default();
        let s = derive_cutoffs(&atom, &c);
        let pref = atom.d_ge.powi(2) / (PI * PI * c.epsilon0 * c.hbar);

        let m = standard_model(CouplingKind::DipoleEx, &atom, &c);
        let expected = c.c * s.k_c.powi(4) * pref / 24.0;
        assert_relative_eq!(zeno_time(&m, &atom, &c).unwrap().powi(-2), expected, max_relative = 1e-12);

        let m = standard_model(CouplingKind::ExactAp, &atom, &c);
        let expected = pref * atom.omega_eg.powi(2) * s.omega_x.powi(2) / (36.0 * c.c.powi(3));
        assert_relative_eq!(zeno_time(&m, &atom, &c).unwrap().powi(-2), expected, max_relative = 1e-12);

        let uncoupled = AtomTransition { d_ge: 0.0, ..atom };
        let m = standard_model(CouplingKind::ExactAp, &uncoupled, &c);
        assert_eq!(zeno_time(&m, &uncoupled, &c).unwrap(), f64::INFINITY);
    }

    #[test]
    fn zeno_time_needs_cutoff_for_dipole_kinds() {
        let atom = AtomTransition::hydrogen_2p_1s();
        let c = PhysicalConstants::default();
        let m = CouplingModel {
            kind: CouplingKind::DipoleAp,
            cutoff_wavenumber: None,
            k_x: derive_cutoffs(&atom, &c).k_x(&c),
        };
        assert!(matches!(
            zeno_time(&m, &atom, &c),
            Err(crate::Error::CutoffRequired { .. })
        ));
    }

    #[test]
    fn z_scaling_ratios() {
        let one = z_scaling(1).unwrap();
        assert_eq!((one.tau_z, one.tau_x, one.tau_x_over_tau_z, one.tau_z_over_tau_e), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(z_scaling(2).unwrap().tau_x_over_tau_z, 2.0);
        assert_eq!(z_scaling(3).unwrap().tau_z_over_tau_e, 9.0);
        assert!(z_scaling(0).is_err());
    }
}
