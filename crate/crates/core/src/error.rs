use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not normal (relative defect {defect:.3e})")]
    NotNormal { defect: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("{value} is not an eigenvalue within tolerance")]
    NotAnEigenvalue { value: Complex64 },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("line {line} is not contained in the spectrum (remainder {remainder:.3e})")]
    LineNotInSpectrum { line: String, remainder: f64 },

    #[error("line {line} has multiplicity at least {multiplicity}; compression needs a simple spectral line")]
    MultipleLine { line: String, multiplicity: usize },

    #[error("malformed input {path}: {reason}")]
    Malformed { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
