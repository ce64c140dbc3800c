use thiserror::Error;

/// Errors produced by the polynomial norm machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} = {value} is over the cap {cap}")]
    Capacity {
        what: &'static str,
        value: u128,
        cap: u64,
    },

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero polynomial: {0}")]
    ZeroPolynomial(&'static str),

    #[error("operators {i} and {j} do not commute (residual {residual:e})")]
    NonCommuting { i: usize, j: usize, residual: f64 },

    #[error("operator tuple violates ({condition}): value {value}")]
    ConditionViolated { condition: String, value: f64 },

    #[error("exponent fit needs at least 3 samples with positive values, got {0}")]
    InsufficientData(usize),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
