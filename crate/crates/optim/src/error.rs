use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum OptimError {
    #[error("non-finite gradient at step {step}; step rejected")]
    NonFiniteGradient { step: u64 },

    #[error("optimizer diverged at step {step}: iterate norm {norm:.3e}")]
    Diverged { step: u64, norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperParam(String),

    #[error("operation requires a model with an exact Hessian-vector product")]
    ExactHvpRequired,
}
