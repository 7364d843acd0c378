//! The idealized two-loop Neumann optimizer.
//!
//! Per outer step: freeze one mini-batch, seed the iterate from the
//! negative gradient, run `K` inner updates
//! `m_k = m_{k-1} - grad(w + eta_in m_{k-1})` against the frozen batch,
//! then move the weights by `eta_out m_K`. On a noiseless quadratic the
//! inner fixed point is `-(1/eta_in) H^{-1} g`, so a converged inner loop
//! makes the outer update an exact Newton step.

use crate::error::OptimError;
use crate::DIVERGENCE_NORM;
use neumann_core::{RngStream, Vector};
use neumann_models::{EpochSampler, LossModel};

#[derive(Debug, Clone, PartialEq)]
pub struct IdealizedParams {
    pub eta_in: f64,
    pub eta_out: f64,
    /// Inner-loop iterations per frozen batch.
    pub inner_iters: usize,
    pub batch_size: usize,
    pub outer_steps: usize,
}

impl IdealizedParams {
    pub fn validate(&self) -> Result<(), OptimError> {
        if !(self.eta_in > 0.0) || !(self.eta_out > 0.0) {
            return Err(OptimError::InvalidHyperParam(
                "eta_in and eta_out must be positive".into(),
            ));
        }
        if self.inner_iters == 0 {
            return Err(OptimError::InvalidHyperParam(
                "inner_iters must be at least 1".into(),
            ));
        }
        if self.batch_size == 0 || self.outer_steps == 0 {
            return Err(OptimError::InvalidHyperParam(
                "batch_size and outer_steps must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Runs the two-loop algorithm from `w0` and returns the final weights.
///
/// Divergence (`||m|| > 1e12` or non-finite) aborts with the offending
/// outer step index.
pub fn idealized_neumann_run(
    model: &dyn LossModel,
    w0: Vector,
    params: &IdealizedParams,
    rng: &mut RngStream,
) -> Result<Vector, OptimError> {
    params.validate()?;
    if w0.len() != model.param_count() {
        return Err(OptimError::DimensionMismatch {
            expected: model.param_count(),
            found: w0.len(),
        });
    }
    let mut sampler = EpochSampler::over_range(
        model.dataset().len(),
        params.batch_size,
        rng.substream("idealized-batches", 0),
    )
    .map_err(|e| OptimError::InvalidHyperParam(e.to_string()))?;

    let mut w = w0;
    for outer in 1..=params.outer_steps {
        let batch = sampler.next_batch();
        let mut m = -&model.gradient(&w, &batch);
        if !m.is_finite() {
            return Err(OptimError::NonFiniteGradient { step: outer as u64 });
        }
        for _ in 0..params.inner_iters {
            let mut displaced = w.clone();
            displaced.axpy(params.eta_in, &m);
            let g = model.gradient(&displaced, &batch);
            if !g.is_finite() {
                return Err(OptimError::NonFiniteGradient { step: outer as u64 });
            }
            m.axpy(-1.0, &g);
            let m_norm = m.norm();
            if !m.is_finite() || m_norm > DIVERGENCE_NORM {
                return Err(OptimError::Diverged {
                    step: outer as u64,
                    norm: m_norm,
                });
            }
        }
        w.axpy(params.eta_out, &m);
    }
    Ok(w)
}
