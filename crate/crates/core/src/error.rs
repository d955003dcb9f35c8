use thiserror::Error;

use crate::gmres::GmresReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular or numerically singular")]
    SingularMatrix,

    #[error("eigenvalue iteration did not converge within its budget")]
    NonConvergence,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("step size {0} is outside the admissible range (0, 2)")]
    InvalidEta(f64),

    #[error("symmetric part is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("point is not stationary: gradient norm {0:e}")]
    NotStationary(f64),

    #[error("restarted GMRES reached {} cycles without meeting the tolerance", .0.cycles)]
    MaxCyclesExceeded(Box<GmresReport>),

    #[error("parse error: {0}")]
    Parse(String),
}
