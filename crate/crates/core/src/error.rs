use thiserror::Error;

use crate::monomial::Monomial;

#[derive(Debug, Error)]
pub enum AbmError {
    #[error("variable count mismatch: expected {expected}, found {found}")]
    VariableMismatch { expected: usize, found: usize },

    #[error("term set is not an order ideal: {missing} divides {term} but is absent")]
    NotOrderIdeal { term: Monomial, missing: Monomial },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("all points coincide; cannot normalize a zero-spread point set")]
    ZeroSpread,

    #[error("weight table was built for a different point set")]
    WeightTableMismatch,

    #[error("degenerate constrained problem: every weight is zero")]
    DegenerateProblem,

    #[error("degree guard exceeded: reached degree {degree} with guard {guard}")]
    DegreeGuard { degree: u32, guard: u32 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("csv error at row {row}, column {column}: {message}")]
    Csv {
        row: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = AbmError> = std::result::Result<T, E>;
