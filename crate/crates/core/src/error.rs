use thiserror::Error;

/// Errors raised by the analytical and simulation engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set violates a model invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative numerical method did not reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A root or threshold search found no admissible value on its bracket.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// Building geometry could not be loaded or used.
    #[error("geometry error: {0}")]
    Geometry(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
