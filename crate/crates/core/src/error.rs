use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rank mismatch: group has rank {expected}, vector has length {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("delta generators are not linearly independent over Q")]
    DependentGenerators,
    #[error("invalid basis index {0} for this algebra")]
    InvalidIndex(String),
    #[error("parameter constraint violated: {0}")]
    Hypothesis(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
