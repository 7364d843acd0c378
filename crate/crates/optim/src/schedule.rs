//! Warm-up + staircase-decay learning-rate schedule.

use crate::error::OptimError;

/// Linear ramp over `warmup_epochs`, then `base_lr * decay_factor^k` where
/// `k` counts completed `decay_every_epochs` periods past warm-up.
/// `decay_every_epochs = 0` disables decay.
#[derive(Debug, Clone, PartialEq)]
pub struct LrSchedule {
    pub base_lr: f64,
    pub warmup_epochs: usize,
    pub decay_every_epochs: usize,
    pub decay_factor: f64,
    pub steps_per_epoch: usize,
}

impl LrSchedule {
    pub fn constant(base_lr: f64, steps_per_epoch: usize) -> Self {
        Self {
            base_lr,
            warmup_epochs: 0,
            decay_every_epochs: 0,
            decay_factor: 1.0,
            steps_per_epoch,
        }
    }

    pub fn validate(&self) -> Result<(), OptimError> {
        if !(self.base_lr > 0.0) {
            return Err(OptimError::InvalidHyperParam(format!(
                "base_lr must be positive, got {}",
                self.base_lr
            )));
        }
        if !(self.decay_factor > 0.0 && self.decay_factor <= 1.0) {
            return Err(OptimError::InvalidHyperParam(format!(
                "decay_factor must be in (0, 1], got {}",
                self.decay_factor
            )));
        }
        if self.steps_per_epoch == 0 {
            return Err(OptimError::InvalidHyperParam(
                "steps_per_epoch must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Learning rate at global step `t` (1-based).
    pub fn lr_at(&self, t: u64) -> f64 {
        debug_assert!(t >= 1, "steps are 1-based");
        let warmup_steps = (self.warmup_epochs * self.steps_per_epoch) as u64;
        if warmup_steps > 0 && t <= warmup_steps {
            return self.base_lr * t as f64 / warmup_steps as f64;
        }
        let epoch = ((t - 1) / self.steps_per_epoch as u64) as usize;
        if self.decay_every_epochs == 0 {
            return self.base_lr;
        }
        let past_warmup = epoch.saturating_sub(self.warmup_epochs);
        let k = (past_warmup / self.decay_every_epochs) as i32;
        self.base_lr * self.decay_factor.powi(k)
    }
}

/// Free-function form of [`LrSchedule::lr_at`].
pub fn lr_at(schedule: &LrSchedule, t: u64) -> f64 {
    schedule.lr_at(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn warmup_ends_exactly_at_base_lr() {
        let s = LrSchedule {
            base_lr: 0.4,
            warmup_epochs: 5,
            decay_every_epochs: 0,
            decay_factor: 1.0,
            steps_per_epoch: 10,
        };
        assert_abs_diff_eq!(s.lr_at(50), 0.4);
        assert!(s.lr_at(49) < 0.4);
        assert_abs_diff_eq!(s.lr_at(1), 0.4 / 50.0);
    }

    #[test]
    fn unit_decay_factor_is_constant() {
        let s = LrSchedule {
            base_lr: 0.1,
            warmup_epochs: 2,
            decay_every_epochs: 3,
            decay_factor: 1.0,
            steps_per_epoch: 4,
        };
        for t in 9..200 {
            assert_abs_diff_eq!(s.lr_at(t), 0.1);
        }
    }

    #[test]
    fn staircase_decay_after_forty_epochs() {
        // base 0.045 decayed by 0.94 every 2 epochs: at epoch 40 the rate
        // has decayed 20 times.
        let s = LrSchedule {
            base_lr: 0.045,
            warmup_epochs: 0,
            decay_every_epochs: 2,
            decay_factor: 0.94,
            steps_per_epoch: 100,
        };
        let t = 40 * 100 + 1; // first step of epoch 40 (0-based)
        let expect = 0.045 * 0.94f64.powi(20);
        assert_abs_diff_eq!(s.lr_at(t), expect, epsilon = 1e-15);
        assert_abs_diff_eq!(expect, 0.0131, epsilon = 2e-4);
    }

    #[test]
    fn validation_rejects_bad_factors() {
        let mut s = LrSchedule::constant(0.1, 10);
        assert!(s.validate().is_ok());
        s.decay_factor = 0.0;
        assert!(s.validate().is_err());
        s.decay_factor = 1.5;
        assert!(s.validate().is_err());
    }
}
