use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("post-selected outcome has zero probability")]
    ZeroProbability,

    #[error("{terms} terms do not fit an index register of capacity {capacity}")]
    IndexOverflow { terms: usize, capacity: usize },

    #[error("ill-conditioned spectral factorization (min |1-|P|^2| on circle = {diagnostic:e})")]
    IllConditioned { diagnostic: f64 },

    #[error("phase finding did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("{qubits} qubits exceeds the dense cap of {cap}")]
    DimensionCap { qubits: usize, cap: usize },

    #[error("no eigenvalue within tolerance of {0}")]
    NoEigenvalue(f64),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
