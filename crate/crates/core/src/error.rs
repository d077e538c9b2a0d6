use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid body spec: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("direction is not a unit vector (|v| = {norm})")]
    NotUnit { norm: f64 },

    #[error("point is not strictly interior (clearance {clearance:e}, required {required:e})")]
    NotInterior { clearance: f64, required: f64 },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge: value {value:e}, error {error:e} after {intervals} intervals")]
    QuadratureNonConvergence {
        value: f64,
        error: f64,
        intervals: usize,
    },

    #[error("sphere grid too large or too coarse: {0}")]
    Grid(String),

    #[error("every optimization start failed: {0}")]
    NoConvergedStart(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
