use thiserror::Error;

use crate::symcore::SymError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degenerate {0}")]
    Degenerate(String),
    #[error("singular {what} (determinant {det})")]
    Singular { what: String, det: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
