use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("structure violation at block ({row}, {col}): {reason}")]
    StructureViolation { row: usize, col: usize, reason: String },

    #[error("regulariser alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),

    #[error("singular pivot {pivot:e} at index {index}")]
    SingularPivot { index: usize, pivot: f64 },

    #[error("odd bit count {0}; QPSK needs bit pairs")]
    OddBitCount(usize),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}

impl Error {
    /// Process exit code used by the CLI: 3 for numerical breakdown, 2 for
    /// everything the caller got wrong.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SingularPivot { .. } => 3,
            _ => 2,
        }
    }
}
