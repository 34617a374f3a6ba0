use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("slice {index}: {msg}")]
    SliceRange { index: usize, msg: String },
    #[error("potential: {0}")]
    Potential(String),
    #[error("boundary mismatch: {0}")]
    Boundary(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("enumeration budget of {0} exceeded")]
    Budget(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
