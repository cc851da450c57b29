//! Survival probability of a two-level emitter coupled to the free
//! electromagnetic field, from the quadratic Zeno regime through the Fermi
//! golden rule to exponential decay.
//!
//! The continuum is cut into energy slices. Slices near resonance form a
//! comb that is diagonalized exactly ([`spectral`]); the rest are added at
//! first order ([`offshell`]). First-order cardinal-sine integrals and the
//! Wigner-Weisskopf curves ([`reference`]) serve as references.
//!
//! Internally all quantities are reduced with `ω_eg = 1`; see [`units`].

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod discretization;
pub mod error;
pub mod exec;
pub mod offshell;
pub mod phase;
pub mod quadrature;
pub mod reference;
pub mod spectral;
pub mod summation;
pub mod units;

pub use coupling::{CouplingKind, CouplingModel, ReducedModel};
pub use discretization::{CombSpec, ModeLadder, OffshellSpec, Region, Spacing};
pub use error::{Error, Result};
pub use exec::Execution;
pub use offshell::{HybridModel, OffshellWeights};
pub use spectral::{ArrowheadHamiltonian, DecayCurve, SpectralDecomposition};
pub use units::{AtomTransition, DerivedScales, PhysicalConstants};
