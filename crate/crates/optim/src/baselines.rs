//! First-order reference optimizers behind one step interface.
//!
//! The momentum buffer holds the displacement (`m' = mu m - lr g`,
//! `w += m'`), the same convention the Neumann optimizer uses, so
//! comparisons differ only in algorithm.

use crate::error::OptimError;
use neumann_core::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Sgd,
    Momentum,
    Adam,
    RmsProp,
}

impl BaselineKind {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::Sgd => "sgd",
            BaselineKind::Momentum => "momentum",
            BaselineKind::Adam => "adam",
            BaselineKind::RmsProp => "rmsprop",
        }
    }
}

/// Baseline hyperparameters. Adam/RMSProp constants default to the
/// standard literature values.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    pub momentum_mu: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub rms_rho: f64,
    pub rms_epsilon: f64,
}

impl BaselineConfig {
    pub fn new(kind: BaselineKind) -> Self {
        Self {
            kind,
            momentum_mu: 0.9,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            rms_rho: 0.9,
            rms_epsilon: 1e-10,
        }
    }
}

/// Mutable per-run state: step counter and the accumulators the variant
/// needs (momentum/first-moment buffer and second-moment buffer).
#[derive(Debug, Clone)]
pub struct BaselineOptimizer {
    config: BaselineConfig,
    t: u64,
    moment1: Vector,
    moment2: Vector,
}

/// Plain gradient-descent update `w <- w - lr g`, shared with the Neumann
/// optimizer's burn-in phase so both produce bit-identical iterates.
pub(crate) fn sgd_update(w: &mut Vector, grad: &Vector, lr: f64) {
    w.axpy(-lr, grad);
}

impl BaselineOptimizer {
    pub fn new(config: BaselineConfig, param_count: usize) -> Self {
        Self {
            config,
            t: 0,
            moment1: Vector::zeros(param_count),
            moment2: Vector::zeros(param_count),
        }
    }

    pub fn kind(&self) -> BaselineKind {
        self.config.kind
    }

    pub fn config(&self) -> &BaselineConfig {
        &self.config
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// Applies one update in place. Rejects non-finite gradients without
    /// touching the state. Returns the update norm.
    pub fn step(&mut self, w: &mut Vector, grad: &Vector, lr: f64) -> Result<f64, OptimError> {
        if grad.len() != w.len() {
            return Err(OptimError::DimensionMismatch {
                expected: w.len(),
                found: grad.len(),
            });
        }
        if !grad.is_finite() {
            return Err(OptimError::NonFiniteGradient { step: self.t + 1 });
        }
        self.t += 1;
        let before = w.clone();
        match self.config.kind {
            BaselineKind::Sgd => sgd_update(w, grad, lr),
            BaselineKind::Momentum => {
                let mu = self.config.momentum_mu;
                for i in 0..w.len() {
                    self.moment1[i] = mu * self.moment1[i] - lr * grad[i];
                    w[i] += self.moment1[i];
                }
            }
            BaselineKind::Adam => {
                let b1 = self.config.adam_beta1;
                let b2 = self.config.adam_beta2;
                let eps = self.config.adam_epsilon;
                let c1 = 1.0 - b1.powi(self.t as i32);
                let c2 = 1.0 - b2.powi(self.t as i32);
                for i in 0..w.len() {
                    let g = grad[i];
                    self.moment1[i] = b1 * self.moment1[i] + (1.0 - b1) * g;
                    self.moment2[i] = b2 * self.moment2[i] + (1.0 - b2) * g * g;
                    let m_hat = self.moment1[i] / c1;
                    let v_hat = self.moment2[i] / c2;
                    w[i] -= lr * m_hat / (v_hat.sqrt() + eps);
                }
            }
            BaselineKind::RmsProp => {
                let rho = self.config.rms_rho;
                let eps = self.config.rms_epsilon;
                for i in 0..w.len() {
                    let g = grad[i];
                    self.moment2[i] = rho * self.moment2[i] + (1.0 - rho) * g * g;
                    w[i] -= lr * g / (self.moment2[i].sqrt() + eps);
                }
            }
        }
        Ok((&*w - &before).norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sgd_step_hand_evaluated() {
        let mut opt = BaselineOptimizer::new(BaselineConfig::new(BaselineKind::Sgd), 2);
        let mut w = Vector::zeros(2);
        let g = Vector::new(vec![1.0, -1.0]);
        opt.step(&mut w, &g, 0.1).unwrap();
        assert_abs_diff_eq!(w[0], -0.1);
        assert_abs_diff_eq!(w[1], 0.1);
    }

    #[test]
    fn momentum_first_step_hand_evaluated() {
        let mut opt = BaselineOptimizer::new(BaselineConfig::new(BaselineKind::Momentum), 1);
        let mut w = Vector::new(vec![1.0]);
        let g = Vector::new(vec![1.0]);
        opt.step(&mut w, &g, 0.1).unwrap();
        // m' = 0.9*0 - 0.1*1 = -0.1; w' = 1 - 0.1
        assert_abs_diff_eq!(w[0], 0.9);
        assert_abs_diff_eq!(opt.moment1[0], -0.1);
    }

    #[test]
    fn zero_gradient_zero_momentum_is_fixed_point() {
        for kind in [
            BaselineKind::Sgd,
            BaselineKind::Momentum,
            BaselineKind::Adam,
            BaselineKind::RmsProp,
        ] {
            let mut opt = BaselineOptimizer::new(BaselineConfig::new(kind), 3);
            let mut w = Vector::new(vec![1.0, 2.0, 3.0]);
            let g = Vector::zeros(3);
            for _ in 0..5 {
                opt.step(&mut w, &g, 0.3).unwrap();
            }
            assert_eq!(w.as_slice(), &[1.0, 2.0, 3.0], "{kind:?} moved on zero grad");
        }
    }

    #[test]
    fn adam_first_step_is_signed_learning_rate() {
        let mut opt = BaselineOptimizer::new(BaselineConfig::new(BaselineKind::Adam), 2);
        let mut w = Vector::zeros(2);
        let g = Vector::new(vec![1.0, 0.0]);
        opt.step(&mut w, &g, 0.1).unwrap();
        // m_hat = g, v_hat = g^2, so the update is -lr * sign(g) up to eps.
        assert_abs_diff_eq!(w[0], -0.1, epsilon = 1e-8);
        assert_abs_diff_eq!(w[1], 0.0);
    }

    #[test]
    fn adam_first_step_invariant_to_gradient_scale() {
        let mut small = BaselineOptimizer::new(BaselineConfig::new(BaselineKind::Adam), 1);
        let mut big = BaselineOptimizer::new(BaselineConfig::new(BaselineKind::Adam), 1);
        let mut w1 = Vector::zeros(1);
        let mut w2 = Vector::zeros(1);
        small
            .step(&mut w1, &Vector::new(vec![1.0]), 0.1)
            .unwrap();
        big.step(&mut w2, &Vector::new(vec![10.0]), 0.1).unwrap();
        assert_abs_diff_eq!(w1[0], w2[0], epsilon = 1e-8);
    }

    #[test]
    fn rmsprop_first_step_hand_evaluated() {
        let mut opt = BaselineOptimizer::new(BaselineConfig::new(BaselineKind::RmsProp), 1);
        let mut w = Vector::zeros(1);
        opt.step(&mut w, &Vector::new(vec![2.0]), 0.1).unwrap();
        // v' = 0.1*4 = 0.4; update = -0.1 * 2 / (sqrt(0.4) + eps)
        let expect = -0.1 * 2.0 / (0.4f64.sqrt() + 1e-10);
        assert_abs_diff_eq!(w[0], expect, epsilon = 1e-12);
        assert_abs_diff_eq!(w[0], -0.3162, epsilon = 1e-4);
    }

    #[test]
    fn rmsprop_constant_gradient_approaches_signed_lr() {
        let mut opt = BaselineOptimizer::new(BaselineConfig::new(BaselineKind::RmsProp), 1);
        let mut w = Vector::zeros(1);
        let g = Vector::new(vec![3.0]);
        let mut last = 0.0;
        for _ in 0..400 {
            let before = w[0];
            opt.step(&mut w, &g, 0.1).unwrap();
            last = w[0] - before;
        }
        assert_abs_diff_eq!(last, -0.1, epsilon = 1e-6);
    }

    #[test]
    fn non_finite_gradient_rejected_without_mutation() {
        let mut opt = BaselineOptimizer::new(BaselineConfig::new(BaselineKind::Momentum), 2);
        let mut w = Vector::new(vec![1.0, 1.0]);
        let g = Vector::new(vec![f64::NAN, 0.0]);
        let err = opt.step(&mut w, &g, 0.1);
        assert!(matches!(err, Err(OptimError::NonFiniteGradient { .. })));
        assert_eq!(w.as_slice(), &[1.0, 1.0]);
        assert_eq!(opt.step_count(), 0);
    }
}
