//! One-hidden-layer tanh network with cross-entropy loss: the smallest
//! nonconvex built-in problem. Gradients come from reverse accumulation;
//! Hessian-vector products use the finite-difference default.
//!
//! Parameter layout: `W1 (h x d, row-major) | b1 (h) | w2 (h) | b2 (1)`.

use crate::dataset::{Dataset, DatasetKind, MiniBatch, Sample};
use crate::error::ModelError;
use crate::model::LossModel;
use neumann_core::{RngStream, Vector};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct MlpProblem {
    dataset: Arc<Dataset>,
    feature_dim: usize,
    hidden: usize,
}

/// XOR-style data: four Gaussian clusters at `(±1, ±1)` in the first two
/// feature dimensions, labeled by the product of signs. With one feature
/// dimension this degenerates to two linearly separable clusters.
pub fn make_mlp_problem(
    feature_dim: usize,
    hidden_width: usize,
    n_samples: usize,
    seed: u64,
) -> Result<MlpProblem, ModelError> {
    if feature_dim == 0 {
        return Err(ModelError::InvalidProblem("feature_dim must be >= 1".into()));
    }
    if hidden_width == 0 {
        return Err(ModelError::InvalidProblem("hidden_width must be >= 1".into()));
    }
    if n_samples == 0 {
        return Err(ModelError::InvalidProblem("need at least one sample".into()));
    }
    let mut rng = RngStream::new(seed).substream("mlp-data", 0);
    let mut samples = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let quadrant = i % 4;
        let s1 = if quadrant & 1 == 0 { 1.0 } else { -1.0 };
        let s2 = if quadrant & 2 == 0 { 1.0 } else { -1.0 };
        let mut x = vec![0.0; feature_dim];
        x[0] = s1 + 0.4 * rng.normal();
        let label = if feature_dim >= 2 {
            x[1] = s2 + 0.4 * rng.normal();
            if s1 * s2 < 0.0 {
                1.0
            } else {
                0.0
            }
        } else if s1 > 0.0 {
            1.0
        } else {
            0.0
        };
        for slot in x.iter_mut().skip(2) {
            *slot = 0.3 * rng.normal();
        }
        samples.push(Sample {
            features: x,
            target: label,
        });
    }
    let dataset = Dataset::new(samples, DatasetKind::Classification)?;
    Ok(MlpProblem {
        dataset: Arc::new(dataset),
        feature_dim,
        hidden: hidden_width,
    })
}

struct Forward {
    hidden_out: Vec<f64>,
    logit: f64,
}

impl MlpProblem {
    pub fn hidden_width(&self) -> usize {
        self.hidden
    }

    fn w1(&self, w: &Vector, unit: usize, j: usize) -> f64 {
        w[unit * self.feature_dim + j]
    }

    fn b1_at(&self, w: &Vector, unit: usize) -> f64 {
        w[self.hidden * self.feature_dim + unit]
    }

    fn w2_at(&self, w: &Vector, unit: usize) -> f64 {
        w[self.hidden * self.feature_dim + self.hidden + unit]
    }

    fn b2_at(&self, w: &Vector) -> f64 {
        w[self.param_count() - 1]
    }

    fn forward(&self, w: &Vector, features: &[f64]) -> Forward {
        let mut hidden_out = Vec::with_capacity(self.hidden);
        let mut logit = self.b2_at(w);
        for k in 0..self.hidden {
            let mut a = self.b1_at(w, k);
            for (j, &x) in features.iter().enumerate() {
                a += self.w1(w, k, j) * x;
            }
            let t = a.tanh();
            logit += self.w2_at(w, k) * t;
            hidden_out.push(t);
        }
        Forward { hidden_out, logit }
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

fn bce(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

impl LossModel for MlpProblem {
    fn param_count(&self) -> usize {
        self.hidden * self.feature_dim + 2 * self.hidden + 1
    }

    fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    fn loss(&self, w: &Vector, batch: &MiniBatch) -> f64 {
        let mut acc = 0.0;
        for &i in batch.indices() {
            let s = self.dataset.sample(i);
            acc += bce(self.forward(w, &s.features).logit, s.target);
        }
        acc / batch.size() as f64
    }

    fn gradient(&self, w: &Vector, batch: &MiniBatch) -> Vector {
        let n = self.param_count();
        let d = self.feature_dim;
        let h = self.hidden;
        let mut g = Vector::zeros(n);
        for &i in batch.indices() {
            let s = self.dataset.sample(i);
            let f = self.forward(w, &s.features);
            let dz = sigmoid(f.logit) - s.target;
            g[n - 1] += dz;
            for k in 0..h {
                let t = f.hidden_out[k];
                g[h * d + h + k] += dz * t;
                let da = dz * self.w2_at(w, k) * (1.0 - t * t);
                g[h * d + k] += da;
                for (j, &x) in s.features.iter().enumerate() {
                    g[k * d + j] += da * x;
                }
            }
        }
        g.scale_mut(1.0 / batch.size() as f64);
        g
    }

    fn predict(&self, w: &Vector, features: &[f64]) -> f64 {
        sigmoid(self.forward(w, features).logit)
    }

    fn init_weights(&self, rng: &mut RngStream) -> Vector {
        let mut w = Vector::zeros(self.param_count());
        let d = self.feature_dim;
        let h = self.hidden;
        let in_scale = 1.0 / (d as f64).sqrt();
        for k in 0..h {
            for j in 0..d {
                w[k * d + j] = in_scale * rng.normal();
            }
        }
        let out_scale = 1.0 / (h as f64).sqrt();
        for k in 0..h {
            w[h * d + h + k] = out_scale * rng.normal();
        }
        w
    }
}
