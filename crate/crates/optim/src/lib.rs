//! Stochastic optimizers: the Neumann optimizer in both its idealized
//! two-loop and practical flattened forms, and the first-order baselines
//! (SGD, momentum, Adam, RMSProp) it is benchmarked against.

pub mod baselines;
pub mod error;
pub mod idealized;
pub mod neumann;
pub mod schedule;

pub use baselines::{BaselineConfig, BaselineKind, BaselineOptimizer};
pub use error::OptimError;
pub use idealized::{idealized_neumann_run, IdealizedParams};
pub use neumann::{
    convexified_direction_check, mu_at, regularized_gradient, DirectionCheck, EtaSchedule,
    NeumannHyperParams, NeumannOptimizer, NeumannState, Phase, StepInfo,
};
pub use schedule::LrSchedule;

/// Iterate norms above this abort a run as divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;
