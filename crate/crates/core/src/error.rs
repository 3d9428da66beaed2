use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("tolerance not met: achieved error {achieved:e}, requested {requested:e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },

    #[error("Hermitian factorization failed at pivot {pivot} (condition estimate {condition:e})")]
    Factorization { pivot: usize, condition: f64 },

    #[error("operation not applicable: {0}")]
    Inapplicable(String),

    #[error("unbounded integrand near t = {location}: {detail}")]
    Unbounded { location: f64, detail: String },

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
