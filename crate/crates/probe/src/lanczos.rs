//! Symmetric Lanczos recurrence with full reorthogonalization.

use crate::error::ProbeError;
use neumann_core::{dense_sym_eigs, LinearOperator, RngStream, SymMatrix, Vector};

/// Off-diagonal coefficients below this terminate the recurrence early:
/// an invariant subspace has been found.
pub const BREAKDOWN_TOL: f64 = 1e-12;

/// Output of the Lanczos recurrence: diagonal `alphas` and nonnegative
/// off-diagonal `betas` (one shorter).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    alphas: Vec<f64>,
    betas: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self, ProbeError> {
        if alphas.is_empty() {
            return Err(ProbeError::InvalidTridiagonal("empty diagonal".into()));
        }
        if betas.len() + 1 != alphas.len() {
            return Err(ProbeError::InvalidTridiagonal(format!(
                "{} alphas need {} betas, got {}",
                alphas.len(),
                alphas.len() - 1,
                betas.len()
            )));
        }
        if betas.iter().any(|b| *b < 0.0) {
            return Err(ProbeError::InvalidTridiagonal(
                "negative off-diagonal".into(),
            ));
        }
        Ok(Self { alphas, betas })
    }

    /// Realized iteration count (may be below the requested `k` on early
    /// termination).
    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn to_dense(&self) -> SymMatrix {
        SymMatrix::from_tridiagonal(&self.alphas, &self.betas)
            .expect("lengths validated at construction")
    }
}

/// Sorted Ritz values with the iteration count that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct RitzSpectrum {
    pub values: Vec<f64>,
    pub k: usize,
    pub shift_used: Option<f64>,
}

impl RitzSpectrum {
    pub fn smallest(&self) -> f64 {
        self.values[0]
    }

    pub fn largest(&self) -> f64 {
        *self.values.last().expect("nonempty by construction")
    }
}

/// Runs `k` Lanczos iterations from a random unit start vector, with full
/// reorthogonalization against all stored basis vectors. Terminates early
/// when an off-diagonal underflows [`BREAKDOWN_TOL`], returning the
/// leading block found so far.
pub fn lanczos(
    a: &impl LinearOperator,
    k: usize,
    rng: &mut RngStream,
) -> Result<TridiagonalMatrix, ProbeError> {
    let dim = a.dim();
    if k == 0 || k > dim {
        return Err(ProbeError::InvalidIterationCount { k, dim });
    }

    let mut basis: Vec<Vector> = Vec::with_capacity(k);
    let mut alphas = Vec::with_capacity(k);
    let mut betas: Vec<f64> = Vec::with_capacity(k.saturating_sub(1));

    basis.push(rng.unit_vector(dim));

    for j in 0..k {
        let q = &basis[j];
        let mut u = a.apply(q);
        let alpha = q.dot(&u);
        if !alpha.is_finite() {
            return Err(ProbeError::NonFiniteCoefficient { step: j });
        }
        alphas.push(alpha);
        if j + 1 == k {
            break;
        }
        u.axpy(-alpha, q);
        if j > 0 {
            u.axpy(-betas[j - 1], &basis[j - 1]);
        }
        // Full reorthogonalization: one modified Gram-Schmidt sweep over
        // every stored vector.
        for b in &basis {
            let c = b.dot(&u);
            u.axpy(-c, b);
        }
        let beta = u.norm();
        if !beta.is_finite() {
            return Err(ProbeError::NonFiniteCoefficient { step: j });
        }
        if beta < BREAKDOWN_TOL {
            break;
        }
        betas.push(beta);
        basis.push(u.scale(1.0 / beta));
    }

    TridiagonalMatrix::new(alphas, betas)
}

/// Eigenvalues of the tridiagonal matrix via the dense symmetric oracle,
/// ascending.
pub fn ritz_values(t: &TridiagonalMatrix) -> Result<Vec<f64>, ProbeError> {
    Ok(dense_sym_eigs(&t.to_dense())?)
}
