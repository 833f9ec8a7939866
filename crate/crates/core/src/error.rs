use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function or distribution.
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// A rejection sampler exhausted its iteration cap.
    #[error("{sampler} did not accept a proposal within {cap} rounds")]
    IterationCap { sampler: &'static str, cap: u64 },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}, tolerance {tolerance:e}")]
    Quadrature {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    /// A slice-sampling bracket kept expanding.
    #[error("slice sampler bracket did not close after {0} expansions")]
    SliceBracket(usize),

    /// A kernel was invoked on a state that violates its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Malformed structured-text input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        what,
        detail: detail.into(),
    }
}

pub(crate) fn require_positive(what: &'static str, name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(domain(
            what,
            format!("{name} must be positive and finite, got {value}"),
        ))
    }
}
