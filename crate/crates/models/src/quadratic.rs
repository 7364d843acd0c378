//! Synthetic quadratic problem with a prescribed diagonal Hessian.
//!
//! Per-sample loss: `f_i(w) = 1/2 (w - w*)^T H (w - w*) + (w - w*)^T xi_i`
//! with `H = diag(spectrum)`. The noise vectors are generated in exact
//! cancelling pairs so the full-batch gradient (in dataset order) is
//! `H (w - w*)` with no noise contribution at all.

use crate::dataset::{Dataset, DatasetKind, MiniBatch, Sample};
use crate::error::ModelError;
use crate::model::LossModel;
use neumann_core::{RngStream, Vector};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    spectrum: Vec<f64>,
    w_star: Vector,
    dataset: Arc<Dataset>,
}

/// Builds the quadratic problem. `spectrum` entries may be negative to
/// exercise indefinite curvature; `noise` scales the per-sample gradient
/// perturbations.
pub fn make_quadratic_problem(
    spectrum: &[f64],
    w_star: &Vector,
    noise: f64,
    n_samples: usize,
    seed: u64,
) -> Result<QuadraticProblem, ModelError> {
    let dim = spectrum.len();
    if dim == 0 {
        return Err(ModelError::InvalidProblem("empty spectrum".into()));
    }
    if w_star.len() != dim {
        return Err(ModelError::InvalidProblem(format!(
            "w_star has {} coordinates, spectrum has {}",
            w_star.len(),
            dim
        )));
    }
    if n_samples == 0 {
        return Err(ModelError::InvalidProblem("need at least one sample".into()));
    }
    if !(noise >= 0.0) {
        return Err(ModelError::InvalidProblem(format!(
            "noise must be nonnegative, got {noise}"
        )));
    }

    let mut rng = RngStream::new(seed).substream("quadratic-noise", 0);
    let mut samples = Vec::with_capacity(n_samples);
    let mut pending: Option<Vector> = None;
    for i in 0..n_samples {
        // Pairs (xi, -xi) cancel exactly; odd trailing sample gets zero.
        let xi = if noise == 0.0 {
            Vector::zeros(dim)
        } else if let Some(prev) = pending.take() {
            -&prev
        } else if i + 1 == n_samples {
            Vector::zeros(dim)
        } else {
            let fresh = rng.normal_vector(dim).scale(noise);
            pending = Some(fresh.clone());
            fresh
        };
        samples.push(Sample {
            features: xi.to_vec(),
            target: 0.0,
        });
    }
    let dataset = Dataset::new(samples, DatasetKind::Regression)?;
    Ok(QuadraticProblem {
        spectrum: spectrum.to_vec(),
        w_star: w_star.clone(),
        dataset: Arc::new(dataset),
    })
}

impl QuadraticProblem {
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn optimum(&self) -> &Vector {
        &self.w_star
    }

    /// Mean of the stored noise vectors over the batch, in batch order.
    fn batch_noise_mean(&self, batch: &MiniBatch) -> Vector {
        let dim = self.spectrum.len();
        let mut acc = Vector::zeros(dim);
        for &i in batch.indices() {
            for (j, &x) in self.dataset.sample(i).features.iter().enumerate() {
                acc[j] += x;
            }
        }
        acc.scale_mut(1.0 / batch.size() as f64);
        acc
    }
}

impl LossModel for QuadraticProblem {
    fn param_count(&self) -> usize {
        self.spectrum.len()
    }

    fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    fn loss(&self, w: &Vector, batch: &MiniBatch) -> f64 {
        let delta = w - &self.w_star;
        let mut quad = 0.0;
        for i in 0..delta.len() {
            quad += self.spectrum[i] * delta[i] * delta[i];
        }
        0.5 * quad + delta.dot(&self.batch_noise_mean(batch))
    }

    fn gradient(&self, w: &Vector, batch: &MiniBatch) -> Vector {
        let delta = w - &self.w_star;
        let mut g = Vector::from_fn(delta.len(), |i| self.spectrum[i] * delta[i]);
        g.axpy(1.0, &self.batch_noise_mean(batch));
        g
    }

    fn hvp(&self, _w: &Vector, _batch: &MiniBatch, v: &Vector) -> Vector {
        Vector::from_fn(v.len(), |i| self.spectrum[i] * v[i])
    }

    fn has_exact_hvp(&self) -> bool {
        true
    }

    fn predict(&self, w: &Vector, features: &[f64]) -> f64 {
        // Per-sample loss for the stored noise vector.
        let delta = w - &self.w_star;
        let mut quad = 0.0;
        let mut lin = 0.0;
        for i in 0..delta.len() {
            quad += self.spectrum[i] * delta[i] * delta[i];
            lin += delta[i] * features[i];
        }
        0.5 * quad + lin
    }
}
