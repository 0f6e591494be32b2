use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid convex body: {0}")]
    InvalidBody(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("sampled function queried off its grid at {0:?}")]
    OffGrid(Vec<f64>),
    #[error("function is not integrable: {0}")]
    NotIntegrable(String),
    #[error("MaxOf nesting exceeds depth {0}")]
    DepthExceeded(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("empty sample")]
    EmptySample,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("level set extraction failed: {0}")]
    LevelSet(String),
}

pub type Result<T> = std::result::Result<T, Error>;
