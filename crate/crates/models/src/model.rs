//! The loss-model oracle interface and derivative-check helpers.

use crate::dataset::{Dataset, MiniBatch};
use neumann_core::{
    finite_diff_grad, finite_diff_hvp, CoreError, SymMatrix, Vector, DEFAULT_GRAD_EPS,
    DEFAULT_HVP_EPS,
};
use std::sync::Arc;

/// Per-mini-batch loss oracle: `loss(w, batch)` is the mean of the
/// per-sample losses over the batch, with matching gradient and
/// Hessian-vector product.
///
/// Models are immutable after construction; all methods are pure and
/// callable concurrently.
pub trait LossModel: Send + Sync {
    fn param_count(&self) -> usize;

    /// The dataset this model's batches index into.
    fn dataset(&self) -> &Arc<Dataset>;

    fn loss(&self, w: &Vector, batch: &MiniBatch) -> f64;

    fn gradient(&self, w: &Vector, batch: &MiniBatch) -> Vector;

    /// Hessian-vector product of the batch loss at `w`. The default is a
    /// central finite difference of the gradient; models with closed-form
    /// curvature override it and report [`LossModel::has_exact_hvp`].
    fn hvp(&self, w: &Vector, batch: &MiniBatch, v: &Vector) -> Vector {
        finite_diff_hvp(|x| self.gradient(x, batch), w, v, DEFAULT_HVP_EPS)
            .expect("finite-difference hvp failed")
    }

    fn has_exact_hvp(&self) -> bool {
        false
    }

    /// Model output for one feature vector (probability for classifiers,
    /// predicted value otherwise). Drives accuracy metrics.
    fn predict(&self, w: &Vector, features: &[f64]) -> f64;

    /// A reasonable starting point for training. Zeros unless the model
    /// needs symmetry breaking.
    fn init_weights(&self, rng: &mut RngStream) -> Vector {
        let _ = rng;
        Vector::zeros(self.param_count())
    }
}

use neumann_core::RngStream;

/// Relative error between the analytic gradient and the central-difference
/// gradient of the loss at `w`.
pub fn gradient_check(
    model: &dyn LossModel,
    w: &Vector,
    batch: &MiniBatch,
) -> Result<f64, CoreError> {
    let analytic = model.gradient(w, batch);
    let numeric = finite_diff_grad(|x| model.loss(x, batch), w, DEFAULT_GRAD_EPS)?;
    Ok(relative_error(&analytic, &numeric))
}

/// Relative error between the model's Hessian-vector product and the
/// central-difference product built from the analytic gradient.
pub fn hvp_check(
    model: &dyn LossModel,
    w: &Vector,
    batch: &MiniBatch,
    v: &Vector,
) -> Result<f64, CoreError> {
    let analytic = model.hvp(w, batch, v);
    let numeric = finite_diff_hvp(|x| model.gradient(x, batch), w, v, DEFAULT_HVP_EPS)?;
    Ok(relative_error(&analytic, &numeric))
}

/// `|<Hu, v> - <u, Hv>|` for the model's batch Hessian at `w`.
pub fn hvp_symmetry_defect(
    model: &dyn LossModel,
    w: &Vector,
    batch: &MiniBatch,
    u: &Vector,
    v: &Vector,
) -> f64 {
    let hu = model.hvp(w, batch, u);
    let hv = model.hvp(w, batch, v);
    (hu.dot(v) - u.dot(&hv)).abs()
}

/// Explicitly assembles the batch Hessian column by column from
/// Hessian-vector products on basis vectors, symmetrized. Test/diagnostic
/// oracle only; cost is `param_count` products.
pub fn assemble_dense_hessian(model: &dyn LossModel, w: &Vector, batch: &MiniBatch) -> SymMatrix {
    let n = model.param_count();
    let mut columns = Vec::with_capacity(n);
    for i in 0..n {
        columns.push(model.hvp(w, batch, &Vector::basis(n, i)));
    }
    let mut h = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            h.set_sym(i, j, 0.5 * (columns[j][i] + columns[i][j]));
        }
    }
    h
}

fn relative_error(analytic: &Vector, numeric: &Vector) -> f64 {
    let diff = (analytic - numeric).norm();
    let scale = analytic.norm().max(numeric.norm());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
