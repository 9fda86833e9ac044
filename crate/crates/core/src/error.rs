//! Library-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field mismatch: operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not an involution: {0}")]
    NotInvolution(String),
    #[error("not an isometry: {0}")]
    NotIsometry(String),
    #[error("enumeration cap exceeded: estimated order {estimate} > cap {cap}")]
    CapExceeded { estimate: u128, cap: u64 },
    #[error("parse error at {pos}: {msg}")]
    Parse { msg: String, pos: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
