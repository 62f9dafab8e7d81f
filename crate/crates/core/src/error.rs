use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Invalid user-supplied configuration.
    #[error("usage error: {0}")]
    Usage(String),
    /// Two independent computations disagree. Always an implementation bug.
    #[error("internal consistency failure: {0}")]
    Inconsistency(String),
    /// A truncated series is too short to identify its rational form.
    #[error("insufficient precision: {terms} terms cannot certify a denominator of degree {degree}")]
    InsufficientPrecision { terms: usize, degree: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
