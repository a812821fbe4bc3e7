//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not Hermitian: max |A - A'| = {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("operator is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("density operator trace deviates from one: |tr - 1| = {residual:.3e}")]
    TraceNotOne { residual: f64 },

    #[error("matrix is not unitary: max |U'U - I| = {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("measurement channel incomplete: max |sum M'M - I| = {residual:.3e}")]
    IncompleteChannel { residual: f64 },

    #[error("inverse temperature must be positive, got {beta}")]
    NonPositiveBeta { beta: f64 },

    #[error("temperature must be positive, got {temperature}")]
    NonPositiveTemperature { temperature: f64 },

    #[error("unknown factor label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate factor label `{0}`")]
    DuplicateLabel(String),

    #[error("distribution not normalized: {0}")]
    NotNormalized(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid protocol spec: {0}")]
    InvalidSpec(String),

    #[error("{verifier} precondition violated: {reason}")]
    PreconditionViolated { verifier: &'static str, reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
