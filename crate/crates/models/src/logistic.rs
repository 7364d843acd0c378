//! L2-regularized binary logistic regression on synthetic Gaussian blobs.
//!
//! Parameters are `[weights(d), bias]`. Per-sample loss is binary
//! cross-entropy plus `1e-4/2 * ||w||^2`, which makes the problem strictly
//! convex with a unique finite optimum. Gradient and Hessian-vector
//! products are analytic (sigmoid-weighted Gram form).

use crate::dataset::{Dataset, DatasetKind, MiniBatch, Sample};
use crate::error::ModelError;
use crate::model::LossModel;
use neumann_core::{RngStream, Vector};
use std::sync::Arc;

pub const L2_COEFF: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct LogisticProblem {
    dataset: Arc<Dataset>,
    feature_dim: usize,
    l2: f64,
}

/// Two Gaussian blobs at `±(separation/2) u` for a random unit direction
/// `u`, unit isotropic within-class spread, balanced labels.
pub fn make_logistic_problem(
    feature_dim: usize,
    n_samples: usize,
    separation: f64,
    seed: u64,
) -> Result<LogisticProblem, ModelError> {
    if feature_dim == 0 {
        return Err(ModelError::InvalidProblem("feature_dim must be >= 1".into()));
    }
    if n_samples < 2 {
        return Err(ModelError::InvalidProblem("need at least two samples".into()));
    }
    let mut rng = RngStream::new(seed).substream("logistic-data", 0);
    let direction = rng.unit_vector(feature_dim);
    let mut samples = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let label = (i % 2) as f64;
        let sign = if label > 0.5 { 1.0 } else { -1.0 };
        let mut x = rng.normal_vector(feature_dim);
        x.axpy(sign * separation / 2.0, &direction);
        samples.push(Sample {
            features: x.to_vec(),
            target: label,
        });
    }
    let dataset = Dataset::new(samples, DatasetKind::Classification)?;
    Ok(LogisticProblem {
        dataset: Arc::new(dataset),
        feature_dim,
        l2: L2_COEFF,
    })
}

impl LogisticProblem {
    pub fn l2(&self) -> f64 {
        self.l2
    }

    /// Logit `w . x + bias` for one sample.
    fn raw_score(&self, w: &Vector, features: &[f64]) -> f64 {
        let mut z = 0.0;
        for (j, &x) in features.iter().enumerate() {
            z += w[j] * x;
        }
        z + w[self.feature_dim]
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable `-[y ln p + (1-y) ln(1-p)]` for `p = sigmoid(z)`.
fn bce(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

impl LossModel for LogisticProblem {
    fn param_count(&self) -> usize {
        self.feature_dim + 1
    }

    fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    fn loss(&self, w: &Vector, batch: &MiniBatch) -> f64 {
        let mut acc = 0.0;
        for &i in batch.indices() {
            let s = self.dataset.sample(i);
            acc += bce(self.raw_score(w, &s.features), s.target);
        }
        acc / batch.size() as f64 + 0.5 * self.l2 * w.dot(w)
    }

    fn gradient(&self, w: &Vector, batch: &MiniBatch) -> Vector {
        let n = self.param_count();
        let mut g = Vector::zeros(n);
        for &i in batch.indices() {
            let s = self.dataset.sample(i);
            let residual = sigmoid(self.raw_score(w, &s.features)) - s.target;
            for (j, &x) in s.features.iter().enumerate() {
                g[j] += residual * x;
            }
            g[n - 1] += residual;
        }
        g.scale_mut(1.0 / batch.size() as f64);
        g.axpy(self.l2, w);
        g
    }

    fn hvp(&self, w: &Vector, batch: &MiniBatch, v: &Vector) -> Vector {
        let n = self.param_count();
        let mut out = Vector::zeros(n);
        for &i in batch.indices() {
            let s = self.dataset.sample(i);
            let p = sigmoid(self.raw_score(w, &s.features));
            let weight = p * (1.0 - p);
            // (x~ . v) with the implicit trailing 1 for the bias.
            let mut xv = v[n - 1];
            for (j, &x) in s.features.iter().enumerate() {
                xv += x * v[j];
            }
            let c = weight * xv;
            for (j, &x) in s.features.iter().enumerate() {
                out[j] += c * x;
            }
            out[n - 1] += c;
        }
        out.scale_mut(1.0 / batch.size() as f64);
        out.axpy(self.l2, v);
        out
    }

    fn has_exact_hvp(&self) -> bool {
        true
    }

    fn predict(&self, w: &Vector, features: &[f64]) -> f64 {
        sigmoid(self.raw_score(w, features))
    }
}
