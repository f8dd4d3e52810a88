use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid size {size}: {reason}")]
    InvalidSize { size: usize, reason: &'static str },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("diagonal entry {index} of the inverse is not positive ({value})")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("dyadic arithmetic overflow")]
    Overflow,

    #[error("operation requires dyadic data: {0}")]
    NotDyadic(&'static str),

    #[error("permutation map is not a bijection")]
    InvalidPermutation,

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("catalog entry `{id}` failed validation: {reason}")]
    Catalog { id: String, reason: String },

    #[error("checksum mismatch for `{id}`: manifest {expected}, data {actual}")]
    Checksum {
        id: String,
        expected: String,
        actual: String,
    },

    #[error("degenerate regression design: {0}")]
    DegenerateFit(&'static str),

    #[error("fitted lines are parallel")]
    ParallelLines,

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
