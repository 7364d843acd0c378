use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("lanczos iteration count must satisfy 1 <= k <= dim (k={k}, dim={dim})")]
    InvalidIterationCount { k: usize, dim: usize },

    #[error("non-finite recurrence coefficient at lanczos step {step}; operator may be asymmetric or unbounded")]
    NonFiniteCoefficient { step: usize },

    #[error("invalid tridiagonal matrix: {0}")]
    InvalidTridiagonal(String),

    #[error("checkpoint {path} has {found} parameters, model expects {expected}")]
    CheckpointDimMismatch {
        path: String,
        expected: usize,
        found: usize,
    },

    #[error(transparent)]
    Eigensolver(#[from] neumann_core::CoreError),

    #[error("batch sampling failed: {0}")]
    Sampling(#[from] neumann_models::ModelError),
}
