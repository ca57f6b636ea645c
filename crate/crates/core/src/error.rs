use thiserror::Error;

/// Errors raised anywhere in the detection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (smallest eigenvalue {min_eig:.3e}, largest {max_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64, max_eig: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("operation requires a temporally white noise case, got {0}")]
    WrongCase(String),

    #[error("probability of false alarm must lie in (0, 1), got {0}")]
    InvalidPfa(f64),

    #[error("probability must lie in (0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
