use thiserror::Error;

/// Errors produced by the bound computations and their inputs.
#[derive(Debug, Error)]
pub enum PibiError {
    /// An input value violates a type invariant (non-finite, out of range, …).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A requested dense construction exceeds the configured size cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Matrix or vector dimensions do not match.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A numerical routine failed to converge or returned garbage.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Malformed data file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PibiError>;
