use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("matrix is not Hermitian (max |A_ij - conj(A_ji)| = {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    EigenNonConvergence { sweeps: usize, residual: f64 },

    #[error("Schatten exponent p = {0} is below 1")]
    InvalidSchattenExponent(f64),

    #[error("not an effect: spectrum spans [{min:e}, {max:e}]")]
    NotAnEffect { min: f64, max: f64 },

    #[error("not a state: min eigenvalue {min_eigenvalue:e}, trace {trace}")]
    NotAState { min_eigenvalue: f64, trace: f64 },

    #[error("vectors {i} and {j} do not describe orthogonal projectors (overlap {overlap:e})")]
    NonOrthogonalFamily { i: usize, j: usize, overlap: f64 },

    #[error("rank {rank} out of range for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("outcome probability {value} at sample {index} lies outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },

    #[error("label {value} at sample {index} is not binary")]
    NonBinaryLabel { index: usize, value: f64 },

    #[error("training data is empty")]
    EmptyData,

    #[error("input {index} is not a {expected}")]
    InvalidInput { index: usize, expected: &'static str },

    #[error("{count} points exceed the shattering cap of {cap}")]
    TooManyPoints { count: usize, cap: usize },

    #[error("point {index} has trace norm {norm} > 1")]
    NormViolation { index: usize, norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("encoder has no state for bit string {0}")]
    MissingEncoding(String),

    #[error("decoder {bit} is not a complete POVM (deviation {deviation:e})")]
    IncompletePovm { bit: usize, deviation: f64 },

    #[error("operation not supported for hypothesis class {0}")]
    UnsupportedClass(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
