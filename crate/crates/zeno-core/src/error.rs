use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("{kind} envelope diverges without a cutoff wavenumber")]
    CutoffRequired { kind: &'static str },

    #[error("series does not converge for x = {x} (needs 0 <= x < 1)")]
    SeriesDivergent { x: f64 },

    #[error("{what} did not converge: value {value:e}, error estimate {achieved:e}")]
    Convergence {
        what: &'static str,
        value: f64,
        achieved: f64,
    },

    #[error("the comb has no modes")]
    EmptyComb,

    #[error("mode index {index} out of range for {len} modes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("record undersampled: phase step {phase_step:e} rad exceeds {bound} rad")]
    Undersampled { phase_step: f64, bound: f64 },

    #[error("eigensolver failed: residual {residual:e}")]
    Eigen { residual: f64 },

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
