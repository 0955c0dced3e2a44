use thiserror::Error;

/// Errors produced by the measure library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("trace {0} differs from 1 beyond tolerance")]
    TraceMismatch(f64),
    #[error("state is not pure (second-largest eigenvalue {0:e})")]
    NotPure(f64),
    #[error("objective is infinite at every sampled starting point")]
    NoFeasiblePoint,
    #[error("support of the first argument is not contained in the support of the second")]
    SupportViolation,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cross-check failed: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
