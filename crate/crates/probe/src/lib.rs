//! Lanczos tridiagonalization over matrix-free operators, and the
//! mini-batch Hessian eigenvalue probe built on it.
//!
//! Lanczos after `k` iterations yields a `k x k` tridiagonal matrix whose
//! eigenvalues (Ritz values) approximate the extreme eigenvalues of the
//! probed operator. For the most negative eigenvalue the operator is
//! shifted by an upper bound on the largest one, so the target becomes the
//! extreme of the shifted spectrum.

pub mod error;
pub mod lanczos;
pub mod probe;

pub use error::ProbeError;
pub use lanczos::{lanczos, ritz_values, RitzSpectrum, TridiagonalMatrix, BREAKDOWN_TOL};
pub use probe::{
    extremal_eigs, trajectory_probe, write_probe_csv, CheckpointWeights, ExtremalEigs,
    HvpOperator, ProbeRecord, PROBE_CSV_HEADER,
};
