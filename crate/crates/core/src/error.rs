use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("operator is not Hermitian positive semidefinite: {0}")]
    NotPositiveSemidefinite(String),

    #[error("family has no subspaces")]
    EmptyFamily,

    #[error("weight hypothesis violated at index {index}: A/B = {a_over_b} exceeds ratio {ratio}")]
    HypothesisViolation {
        index: usize,
        ratio: f64,
        a_over_b: f64,
    },

    #[error("decomposition failed to converge: {0}")]
    Computation(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
