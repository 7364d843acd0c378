//! Central-difference derivative approximations, used as independent
//! oracles for analytic gradients and as the default Hessian-vector
//! product for models without an exact one.

use crate::error::CoreError;
use crate::vector::Vector;

/// Default step for gradient checks.
pub const DEFAULT_GRAD_EPS: f64 = 1e-5;

/// Default base step for Hessian-vector products; scaled by `1/max(1, ||v||)`.
pub const DEFAULT_HVP_EPS: f64 = 1e-4;

/// Central-difference gradient: coordinate `i` is
/// `(f(w + eps e_i) - f(w - eps e_i)) / (2 eps)`.
pub fn finite_diff_grad(
    f: impl Fn(&Vector) -> f64,
    w: &Vector,
    eps: f64,
) -> Result<Vector, CoreError> {
    if !(eps > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "finite-difference step must be positive, got {eps}"
        )));
    }
    let mut grad = Vector::zeros(w.len());
    let mut probe = w.clone();
    for i in 0..w.len() {
        probe[i] = w[i] + eps;
        let plus = f(&probe);
        probe[i] = w[i] - eps;
        let minus = f(&probe);
        probe[i] = w[i];
        if !plus.is_finite() || !minus.is_finite() {
            return Err(CoreError::NonFinite("function value in finite_diff_grad"));
        }
        grad[i] = (plus - minus) / (2.0 * eps);
    }
    Ok(grad)
}

/// Central-difference Hessian-vector product:
/// `(grad(w + eps v) - grad(w - eps v)) / (2 eps)` with
/// `eps = eps0 / max(1, ||v||)`. Exact to rounding for quadratics.
pub fn finite_diff_hvp(
    grad_fn: impl Fn(&Vector) -> Vector,
    w: &Vector,
    v: &Vector,
    eps0: f64,
) -> Result<Vector, CoreError> {
    if v.len() != w.len() {
        return Err(CoreError::DimensionMismatch {
            expected: w.len(),
            found: v.len(),
        });
    }
    if !(eps0 > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "finite-difference step must be positive, got {eps0}"
        )));
    }
    let v_norm = v.norm();
    if v_norm == 0.0 {
        return Err(CoreError::ZeroDirection);
    }
    let eps = eps0 / v_norm.max(1.0);

    let mut forward = w.clone();
    forward.axpy(eps, v);
    let g_plus = grad_fn(&forward);

    let mut backward = w.clone();
    backward.axpy(-eps, v);
    let g_minus = grad_fn(&backward);

    if !g_plus.is_finite() || !g_minus.is_finite() {
        return Err(CoreError::NonFinite("gradient value in finite_diff_hvp"));
    }
    let mut out = &g_plus - &g_minus;
    out.scale_mut(1.0 / (2.0 * eps));
    Ok(out)
}
