//! Problem-family specification, the bridge between configuration and the
//! built-in models.

use crate::error::ModelError;
use crate::logistic::make_logistic_problem;
use crate::mlp::make_mlp_problem;
use crate::model::LossModel;
use crate::quadratic::make_quadratic_problem;
use neumann_core::RngStream;

/// Which built-in problem to construct, with its generation parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Quadratic {
        spectrum: Vec<f64>,
        noise: f64,
        n_samples: usize,
        seed: u64,
    },
    Logistic {
        feature_dim: usize,
        n_samples: usize,
        separation: f64,
        seed: u64,
    },
    Mlp {
        feature_dim: usize,
        hidden_width: usize,
        n_samples: usize,
        seed: u64,
    },
}

impl ProblemSpec {
    pub fn family(&self) -> &'static str {
        match self {
            ProblemSpec::Quadratic { .. } => "quadratic",
            ProblemSpec::Logistic { .. } => "logistic",
            ProblemSpec::Mlp { .. } => "mlp",
        }
    }

    pub fn n_samples(&self) -> usize {
        match self {
            ProblemSpec::Quadratic { n_samples, .. }
            | ProblemSpec::Logistic { n_samples, .. }
            | ProblemSpec::Mlp { n_samples, .. } => *n_samples,
        }
    }

    /// Builds the model. The quadratic's optimum is drawn from the seed
    /// with coordinates scaled so `||w*||` is O(1).
    pub fn build(&self) -> Result<Box<dyn LossModel>, ModelError> {
        match self {
            ProblemSpec::Quadratic {
                spectrum,
                noise,
                n_samples,
                seed,
            } => {
                let dim = spectrum.len();
                if dim == 0 {
                    return Err(ModelError::InvalidProblem("empty spectrum".into()));
                }
                let mut rng = RngStream::new(*seed).substream("quadratic-wstar", 0);
                let w_star = rng.normal_vector(dim).scale(1.0 / (dim as f64).sqrt());
                Ok(Box::new(make_quadratic_problem(
                    spectrum, &w_star, *noise, *n_samples, *seed,
                )?))
            }
            ProblemSpec::Logistic {
                feature_dim,
                n_samples,
                separation,
                seed,
            } => Ok(Box::new(make_logistic_problem(
                *feature_dim,
                *n_samples,
                *separation,
                *seed,
            )?)),
            ProblemSpec::Mlp {
                feature_dim,
                hidden_width,
                n_samples,
                seed,
            } => Ok(Box::new(make_mlp_problem(
                *feature_dim,
                *hidden_width,
                *n_samples,
                *seed,
            )?)),
        }
    }
}

/// Log-spaced SPD spectrum from `1/condition` up to `1.0`.
pub fn logspace_spectrum(dim: usize, condition: f64) -> Vec<f64> {
    assert!(dim >= 1 && condition >= 1.0);
    if dim == 1 {
        return vec![1.0];
    }
    let lo = (1.0 / condition).ln();
    let hi = 0.0f64;
    (0..dim)
        .map(|i| (lo + (hi - lo) * i as f64 / (dim - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_produces_consistent_dimensions() {
        let spec = ProblemSpec::Logistic {
            feature_dim: 3,
            n_samples: 10,
            separation: 1.0,
            seed: 2,
        };
        let model = spec.build().unwrap();
        assert_eq!(model.param_count(), 4);
        assert_eq!(model.dataset().len(), 10);
    }

    #[test]
    fn logspace_endpoints() {
        let s = logspace_spectrum(5, 1000.0);
        assert!((s[0] - 0.001).abs() < 1e-12);
        assert!((s[4] - 1.0).abs() < 1e-12);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn same_seed_same_dataset() {
        let spec = ProblemSpec::Mlp {
            feature_dim: 2,
            hidden_width: 3,
            n_samples: 12,
            seed: 8,
        };
        let a = spec.build().unwrap();
        let b = spec.build().unwrap();
        assert_eq!(a.dataset().samples(), b.dataset().samples());
    }
}
