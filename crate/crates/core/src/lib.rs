//! Numeric foundations for the Neumann optimizer workspace.
//!
//! This crate holds the pieces everything else is built on: a dense `f64`
//! [`Vector`], a symmetric [`LinearOperator`] abstraction, the
//! Richardson/Neumann-series linear solver, a dense symmetric eigensolver
//! used as an independent oracle in tests and probes, central-difference
//! derivative approximations, and a reproducible seeded RNG with derivable
//! substreams.
//!
//! All operations are pure functions of their inputs and use a fixed
//! left-to-right summation order, so identical seeds and inputs produce
//! bit-identical results across runs.

pub mod eigen;
pub mod error;
pub mod finitediff;
pub mod linop;
pub mod richardson;
pub mod rng;
pub mod vector;

pub use eigen::{dense_sym_eigs, SymMatrix, DEFAULT_EIG_DIM_CAP};
pub use error::CoreError;
pub use finitediff::{finite_diff_grad, finite_diff_hvp, DEFAULT_GRAD_EPS, DEFAULT_HVP_EPS};
pub use linop::{FnOperator, LinearOperator, ShiftedOperator};
pub use richardson::{richardson_solve, SolveReport, DIVERGENCE_FACTOR};
pub use rng::RngStream;
pub use vector::Vector;
