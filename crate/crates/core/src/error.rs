use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("evolution time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("resolvent is singular at x = {x} (|det| = {det:e})")]
    SingularResolvent { x: f64, det: f64 },

    #[error("the total spectrum needs a positive instrumental width; report the elastic line separately")]
    ZeroInstrumentalWidth,

    #[error("singular linear system")]
    SingularSystem,

    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {intervals} intervals")]
    QuadratureNonConvergence { value: f64, error: f64, intervals: usize },

    #[error("deviation did not decay: |d| = {norm:e} at tau = {tau}")]
    NoDecay { tau: f64, norm: f64 },

    #[error("finite-beam equilibrium is not a statistical operator: u = {u}, |v|^2 = {v2}")]
    NonPositiveEquilibrium { u: f64, v2: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite, got {value}")))
    }
}
