use thiserror::Error;

/// Errors reported by the numeric kernels and solvers.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotSymmetric { defect: f64, tol: f64 },

    #[error("matrix dimension {dim} exceeds eigensolver cap {cap}")]
    DimCapExceeded { dim: usize, cap: usize },

    #[error("direction vector must be nonzero")]
    ZeroDirection,

    #[error("matrix is numerically singular")]
    Singular,
}
