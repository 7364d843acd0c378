//! Richardson iteration: the fixed-point recurrence realizing the Neumann
//! series for a matrix inverse.
//!
//! For `A` with eigenvalues in `(0, 2)` the recurrence
//! `z_{t+1} = (I - A) z_t + b` converges to `A^{-1} b`; equivalently each
//! step adds the current residual, `z <- z + (b - A z)`.

use crate::error::CoreError;
use crate::linop::LinearOperator;
use crate::vector::Vector;

/// Iterate norms above `DIVERGENCE_FACTOR * ||b||` abort the solve.
pub const DIVERGENCE_FACTOR: f64 = 1e12;

/// Outcome of a [`richardson_solve`] run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Vector,
    pub iterations: usize,
    pub converged: bool,
    /// `||b - A z||` at the final iterate.
    pub final_residual: f64,
    /// Residual norm after each iteration, starting with the initial iterate
    /// `z_0 = b` at index 0.
    pub residual_history: Vec<f64>,
}

/// Solves `A z = b` by Richardson iteration starting from `z_0 = b`.
///
/// Converges when `||b - A z|| <= tol * ||b||`. If the iterate norm exceeds
/// [`DIVERGENCE_FACTOR`] times `||b||`, or turns non-finite, the solve stops
/// with `converged = false`.
pub fn richardson_solve(
    a: &impl LinearOperator,
    b: &Vector,
    max_iters: usize,
    tol: f64,
) -> Result<SolveReport, CoreError> {
    if a.dim() != b.len() {
        return Err(CoreError::DimensionMismatch {
            expected: a.dim(),
            found: b.len(),
        });
    }
    if !b.is_finite() {
        return Err(CoreError::NonFinite("right-hand side"));
    }
    if !(tol > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }

    let b_norm = b.norm();
    let target = tol * b_norm;
    let blowup = DIVERGENCE_FACTOR * b_norm;

    let mut z = b.clone();
    let mut residual = residual_of(a, b, &z);
    let mut res_norm = residual.norm();
    let mut history = vec![res_norm];

    let mut converged = res_norm <= target && max_iters == 0;
    let mut iterations = 0;

    for t in 1..=max_iters {
        // z_{t+1} = (I - A) z_t + b, written as z + (b - A z).
        z.axpy(1.0, &residual);
        iterations = t;

        if !z.is_finite() {
            converged = false;
            res_norm = f64::INFINITY;
            history.push(res_norm);
            break;
        }

        residual = residual_of(a, b, &z);
        res_norm = residual.norm();
        history.push(res_norm);

        if res_norm <= target {
            converged = true;
            break;
        }
        if z.norm() > blowup {
            converged = false;
            break;
        }
    }

    Ok(SolveReport {
        solution: z,
        iterations,
        converged,
        final_residual: res_norm,
        residual_history: history,
    })
}

fn residual_of(a: &impl LinearOperator, b: &Vector, z: &Vector) -> Vector {
    let az = a.apply(z);
    b - &az
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::SymMatrix;
    use approx::assert_abs_diff_eq;

    #[test]
    fn half_identity_converges_to_double() {
        // A = 0.5 I, b = (1,1): fixed point is 2b, and z_1 = 1.5 b.
        let a = SymMatrix::diag(&[0.5, 0.5]);
        let b = Vector::new(vec![1.0, 1.0]);
        let report = richardson_solve(&a, &b, 200, 1e-12).unwrap();
        assert!(report.converged);
        assert_abs_diff_eq!(report.solution[0], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(report.solution[1], 2.0, epsilon = 1e-10);
        // First iterate per the recurrence.
        assert_abs_diff_eq!(report.residual_history[0], b.norm() * 0.5, epsilon = 1e-12);
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let a = SymMatrix::identity(2);
        let b = Vector::new(vec![3.0, -1.0]);
        let report = richardson_solve(&a, &b, 50, 1e-14).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.solution.as_slice(), b.as_slice());
    }

    #[test]
    fn spectral_radius_above_one_diverges() {
        // A = 3 I: I - A has spectral radius 2, iterates grow geometrically.
        let a = SymMatrix::diag(&[3.0]);
        let b = Vector::new(vec![1.0]);
        let report = richardson_solve(&a, &b, 100_000, 1e-10).unwrap();
        assert!(!report.converged);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = SymMatrix::identity(2);
        let b = Vector::zeros(3);
        assert!(matches!(
            richardson_solve(&a, &b, 10, 1e-8),
            Err(CoreError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_finite_rhs_rejected() {
        let a = SymMatrix::identity(1);
        let b = Vector::new(vec![f64::NAN]);
        assert!(matches!(
            richardson_solve(&a, &b, 10, 1e-8),
            Err(CoreError::NonFinite(_))
        ));
    }

    #[test]
    fn matches_direct_solve_on_spd_system() {
        let mut rng = crate::rng::RngStream::new(23);
        let spectrum: Vec<f64> = (0..5).map(|_| rng.uniform_in(0.1, 0.9)).collect();
        let a = SymMatrix::with_random_basis(&spectrum, &mut rng);
        let b = rng.normal_vector(5);
        let report = richardson_solve(&a, &b, 5000, 1e-12).unwrap();
        assert!(report.converged);
        let exact = a.solve_sym(&b).unwrap();
        let err = (&report.solution - &exact).norm() / exact.norm();
        assert!(err < 1e-8, "relative error {err}");
    }
}
