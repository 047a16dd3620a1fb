use thiserror::Error;

/// Errors raised by the solvers, estimators and problem builders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite iterate")]
    NonFinite,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("infeasible start point: {0}")]
    Infeasible(String),
    #[error("{0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
