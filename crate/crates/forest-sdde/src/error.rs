//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Configuration violates one of the model assumptions (A1-A4, see crate docs).
    #[error("validation failed, {assumption}: {detail}")]
    Validation {
        assumption: &'static str,
        detail: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A delayed lookup asked for a time before the available history.
    /// Should be unreachable in a verified run; signals a lag-monotonicity
    /// violation upstream.
    #[error("evaluation time {s} precedes available history (lower bound {lower})")]
    OutOfDomain { s: f64, lower: f64 },

    /// The delay integral equation has no solution in the admissible range.
    #[error("delay integral over available range is {available}, below target {target}")]
    IntegralDomain { available: f64, target: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code class for the CLI: 1 = validation, 2 = numerical.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidInput(_) | Error::Validation { .. } | Error::Unsupported(_) => 1,
            Error::OutOfDomain { .. } | Error::IntegralDomain { .. } | Error::Numerical(_) => 2,
        }
    }
}
