//! Loss-model oracles and built-in test problems.
//!
//! A [`LossModel`] exposes per-mini-batch loss, gradient, and (optionally
//! exact) Hessian-vector products over an immutable [`Dataset`]. Three
//! analytic problem families are built in: a quadratic with prescribed
//! Hessian spectrum, L2-regularized logistic regression on Gaussian blobs,
//! and a one-hidden-layer tanh network on XOR-style clusters.

pub mod dataset;
pub mod error;
pub mod logistic;
pub mod mlp;
pub mod model;
pub mod problem;
pub mod quadratic;
pub mod sampler;

pub use dataset::{load_csv, Dataset, DatasetKind, MiniBatch, Sample};
pub use error::ModelError;
pub use logistic::{make_logistic_problem, LogisticProblem};
pub use mlp::{make_mlp_problem, MlpProblem};
pub use model::{
    assemble_dense_hessian, gradient_check, hvp_check, hvp_symmetry_defect, LossModel,
};
pub use problem::ProblemSpec;
pub use quadratic::{make_quadratic_problem, QuadraticProblem};
pub use sampler::EpochSampler;
