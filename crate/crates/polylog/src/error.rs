use thiserror::Error;

/// Errors surfaced by the library modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("Euler gamma failed to cancel: {0}")]
    GammaPresent(String),

    #[error("inconsistent relation system: {0}")]
    Inconsistent(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("closed form not available: {0}")]
    NotSolved(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
