use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid convolution vector: {0}")]
    InvalidConvolution(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("alpha* = {alpha_star} >= 1: no uniform bound on the truncated inverses")]
    NotCertifiable { alpha_star: f64 },

    #[error("truncated Toeplitz matrix is singular or ill-conditioned (size {size})")]
    SingularTruncation { size: usize },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("site {0:?} missing from coupling-constant vector")]
    MissingSite(Vec<i64>),

    #[error("eigensolver failed for {context}: {reason}")]
    Solver { context: String, reason: String },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Fit(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
