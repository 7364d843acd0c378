//! Dense symmetric eigensolver, used as an independent oracle by the
//! Lanczos probe and the solver tests. Not a production path: dimensions
//! are capped.

use crate::error::CoreError;
use crate::linop::LinearOperator;
use crate::rng::RngStream;
use crate::vector::Vector;
use nalgebra::DMatrix;

/// Default dimension cap for the dense eigensolver.
pub const DEFAULT_EIG_DIM_CAP: usize = 2000;

const SYMMETRY_TOL: f64 = 1e-10;

/// Dense symmetric matrix in row-major full storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m.data[i * entries.len() + i] = x;
        }
        m
    }

    /// Builds from row data, rejecting non-square or asymmetric input.
    ///
    /// Symmetry tolerance is `1e-10 * (1 + max |entry|)`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, CoreError> {
        let dim = rows.len();
        for r in rows {
            if r.len() != dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
        }
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = rows[i][j];
            }
        }
        let tol = SYMMETRY_TOL * (1.0 + m.max_abs());
        let defect = m.symmetry_defect();
        if defect > tol {
            return Err(CoreError::NotSymmetric { defect, tol });
        }
        Ok(m)
    }

    /// Symmetric tridiagonal matrix from diagonal `alphas` and off-diagonal
    /// `betas` (`betas.len() == alphas.len() - 1`).
    pub fn from_tridiagonal(alphas: &[f64], betas: &[f64]) -> Result<Self, CoreError> {
        let k = alphas.len();
        if k == 0 || betas.len() + 1 != k {
            return Err(CoreError::DimensionMismatch {
                expected: k.saturating_sub(1),
                found: betas.len(),
            });
        }
        let mut m = Self::zeros(k);
        for i in 0..k {
            m.data[i * k + i] = alphas[i];
        }
        for i in 0..k - 1 {
            m.data[i * k + i + 1] = betas[i];
            m.data[(i + 1) * k + i] = betas[i];
        }
        Ok(m)
    }

    /// `Q diag(spectrum) Q^T` for a random orthogonal `Q`. Handy for
    /// constructing test operators with a known spectrum.
    pub fn with_random_basis(spectrum: &[f64], rng: &mut RngStream) -> Self {
        let n = spectrum.len();
        let g = DMatrix::from_fn(n, n, |_, _| rng.normal());
        let q = g.qr().q();
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(spectrum));
        let m = &q * lambda * q.transpose();
        // Average away the rounding asymmetry of the triple product.
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = 0.5 * (m[(i, j)] + m[(j, i)]);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Max absolute difference between the matrix and its transpose.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Eigenvalues in ascending order, default dimension cap.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, CoreError> {
        self.eigenvalues_capped(DEFAULT_EIG_DIM_CAP)
    }

    pub fn eigenvalues_capped(&self, cap: usize) -> Result<Vec<f64>, CoreError> {
        Ok(self.eigen_pairs_capped(cap)?.0)
    }

    /// Full eigendecomposition: ascending eigenvalues with matching unit
    /// eigenvectors.
    pub fn eigen_pairs(&self) -> Result<(Vec<f64>, Vec<Vector>), CoreError> {
        self.eigen_pairs_capped(DEFAULT_EIG_DIM_CAP)
    }

    fn eigen_pairs_capped(&self, cap: usize) -> Result<(Vec<f64>, Vec<Vector>), CoreError> {
        if self.dim > cap {
            return Err(CoreError::DimCapExceeded {
                dim: self.dim,
                cap,
            });
        }
        if self.dim == 0 {
            return Err(CoreError::InvalidParameter(
                "eigendecomposition of empty matrix".into(),
            ));
        }
        if self.data.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::NonFinite("matrix entries"));
        }
        let tol = SYMMETRY_TOL * (1.0 + self.max_abs());
        let defect = self.symmetry_defect();
        if defect > tol {
            return Err(CoreError::NotSymmetric { defect, tol });
        }
        let se = nalgebra::SymmetricEigen::new(self.to_nalgebra());
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let vectors: Vec<Vector> = order
            .iter()
            .map(|&i| Vector::new(se.eigenvectors.column(i).iter().copied().collect()))
            .collect();
        Ok((values, vectors))
    }

    /// Direct solve of `A x = b` through the eigendecomposition. Test oracle
    /// for the iterative solver; rejects numerically singular matrices.
    pub fn solve_sym(&self, b: &Vector) -> Result<Vector, CoreError> {
        if b.len() != self.dim {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim,
                found: b.len(),
            });
        }
        let (values, vectors) = self.eigen_pairs()?;
        let scale = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut x = Vector::zeros(self.dim);
        for (lambda, q) in values.iter().zip(vectors.iter()) {
            if lambda.abs() <= 1e-12 * scale.max(1.0) {
                return Err(CoreError::Singular);
            }
            x.axpy(q.dot(b) / lambda, q);
        }
        Ok(x)
    }
}

impl LinearOperator for SymMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(v.len(), self.dim, "apply: length mismatch");
        Vector::from_fn(self.dim, |i| {
            let mut acc = 0.0;
            for j in 0..self.dim {
                acc += self.data[i * self.dim + j] * v[j];
            }
            acc
        })
    }
}

/// Sorted (ascending) eigenvalues of a dense symmetric matrix.
pub fn dense_sym_eigs(m: &SymMatrix) -> Result<Vec<f64>, CoreError> {
    m.eigenvalues()
}
