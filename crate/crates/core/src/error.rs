use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid tensor dimensions: {0}")]
    InvalidDims(String),

    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace {0} is not 1 within tolerance")]
    InvalidTrace(f64),

    #[error("logarithm of eigenvalue {0:e} below clamp threshold")]
    LogOfSingular(f64),

    #[error("invalid factor selection: {0}")]
    InvalidFactors(String),

    #[error("Kraus completeness violated (residual {0:e})")]
    Incomplete(f64),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("random generation failed: {0}")]
    Generation(String),

    #[error("unknown suite: {0}")]
    UnknownSuite(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
