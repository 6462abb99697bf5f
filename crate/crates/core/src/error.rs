use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {q} exceeds the supported maximum {max}")]
    FieldTooLarge { q: u64, max: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element index {index} out of range for F_{q}")]
    ElementOutOfRange { index: u64, q: u32 },
    #[error("arity mismatch: expected {expected} variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("polynomials live over different fields (F_{left} vs F_{right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("exponent {exponent} out of range 0..={max}")]
    ExponentOutOfRange { exponent: u64, max: u32 },
    #[error("polynomial degree {degree} exceeds the bound {bound}")]
    DegreeTooHigh { degree: u64, bound: i64 },
    #[error("expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("instance too large for exhaustive enumeration: {points} points (limit {limit})")]
    TooLarge { points: u128, limit: u128 },
    #[error("plurality of an empty list")]
    EmptyInput,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("value out of range: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
