use thiserror::Error;

/// Errors produced by basis construction, propagation, tomography and
/// reconstruction routines.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid tomography record: {0}")]
    InvalidRecord(String),

    #[error("integration failure at t = {t:.6e} s: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("optimizer failed to converge: residual {residual:.3e} after {evals} evaluations")]
    ConvergenceFailure { residual: f64, evals: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
