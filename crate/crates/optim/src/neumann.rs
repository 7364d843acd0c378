//! The practical (flattened) Neumann optimizer.
//!
//! Each step evaluates one stochastic gradient at the stored weights,
//! which are the *displaced* parameters `w_true + mu(t) m`: the momentum
//! lookahead built into the bookkeeping is what lets a single gradient
//! evaluation stand in for the inner Neumann-series iteration. Periodic
//! resets reinitialize the Neumann iterate from the current gradient, with
//! the reset period doubling after each reset. A cubic (attractive) and a
//! repulsive regularizer anchored at an exponential moving average of the
//! weights convexify the objective.

use crate::baselines::sgd_update;
use crate::error::OptimError;
use crate::schedule::LrSchedule;
use crate::DIVERGENCE_NORM;
use neumann_core::Vector;
use neumann_models::{LossModel, MiniBatch};

/// Learning-rate handle: the staircase schedule used by the experiments,
/// or the inverse-time mode with the epoch fraction as clock.
#[derive(Debug, Clone, PartialEq)]
pub enum EtaSchedule {
    Staircase(LrSchedule),
    InverseT { eta0: f64, steps_per_epoch: usize },
}

impl EtaSchedule {
    pub fn constant(eta: f64, steps_per_epoch: usize) -> Self {
        EtaSchedule::Staircase(LrSchedule::constant(eta, steps_per_epoch))
    }

    pub fn lr_at(&self, t: u64) -> f64 {
        match self {
            EtaSchedule::Staircase(s) => s.lr_at(t),
            EtaSchedule::InverseT {
                eta0,
                steps_per_epoch,
            } => eta0 / (1.0 + t as f64 / *steps_per_epoch as f64),
        }
    }

    pub fn validate(&self) -> Result<(), OptimError> {
        match self {
            EtaSchedule::Staircase(s) => s.validate(),
            EtaSchedule::InverseT { eta0, .. } => {
                if !(*eta0 > 0.0) {
                    return Err(OptimError::InvalidHyperParam(format!(
                        "eta0 must be positive, got {eta0}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Neumann optimizer hyperparameters.
///
/// `beta` is the *total* repulsive coefficient; construct via
/// [`NeumannHyperParams::table_defaults`] or scale a per-variable value by
/// the parameter count yourself.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannHyperParams {
    pub eta: EtaSchedule,
    /// Cubic (attractive) regularizer coefficient.
    pub alpha: f64,
    /// Repulsive regularizer coefficient, already scaled by param count.
    pub beta: f64,
    /// Moving-average factor for the anchor weights `v`.
    pub gamma: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    /// Vanilla-SGD warm-up length.
    pub burnin_epochs: usize,
    /// Initial reset period.
    pub k0_epochs: usize,
    /// Double the reset period after every reset.
    pub k_doubling: bool,
    /// Below this `||w - v||` the regularizer term is omitted entirely.
    pub epsilon_guard: f64,
}

/// Per-variable repulsive coefficient used by the defaults.
pub const BETA_PER_VARIABLE: f64 = 1e-5;

impl NeumannHyperParams {
    /// The hyperparameters that work across models: cubic 1e-7, repulsive
    /// 1e-5 per variable, moving average 0.99, momentum clamped to
    /// [0.5, 0.9], 5-epoch SGD warm-up, reset period starting at 10 epochs
    /// and doubling. Only the learning rate is left to the caller.
    pub fn table_defaults(param_count: usize, eta: EtaSchedule) -> Self {
        Self {
            eta,
            alpha: 1e-7,
            beta: BETA_PER_VARIABLE * param_count as f64,
            gamma: 0.99,
            mu_min: 0.5,
            mu_max: 0.9,
            burnin_epochs: 5,
            k0_epochs: 10,
            k_doubling: true,
            epsilon_guard: 1e-12 * (param_count as f64).sqrt(),
        }
    }

    pub fn validate(&self) -> Result<(), OptimError> {
        self.eta.validate()?;
        if self.alpha < 0.0 {
            return Err(OptimError::InvalidHyperParam("alpha must be >= 0".into()));
        }
        if self.beta < 0.0 {
            return Err(OptimError::InvalidHyperParam("beta must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(OptimError::InvalidHyperParam(format!(
                "gamma must be in [0, 1), got {}",
                self.gamma
            )));
        }
        if !(0.0 <= self.mu_min && self.mu_min <= self.mu_max && self.mu_max < 1.0) {
            return Err(OptimError::InvalidHyperParam(format!(
                "need 0 <= mu_min <= mu_max < 1, got [{}, {}]",
                self.mu_min, self.mu_max
            )));
        }
        if self.k0_epochs == 0 {
            return Err(OptimError::InvalidHyperParam(
                "k0_epochs must be at least 1".into(),
            ));
        }
        if self.epsilon_guard < 0.0 {
            return Err(OptimError::InvalidHyperParam(
                "epsilon_guard must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Momentum schedule `mu(t) = clamp(1 - 1/(1 + e), mu_min, mu_max)` with
/// `e = t / steps_per_epoch` the fractional epoch count.
pub fn mu_at(t: u64, hp: &NeumannHyperParams, steps_per_epoch: usize) -> f64 {
    let e = t as f64 / steps_per_epoch as f64;
    (1.0 - 1.0 / (1.0 + e)).clamp(hp.mu_min, hp.mu_max)
}

/// Gradient of the regularized objective:
/// `grad + (alpha ||d||^2 - beta / ||d||^2) d / ||d||` with `d = w - v`.
/// When `||d|| <= epsilon_guard` the regularizer is omitted.
pub fn regularized_gradient(
    grad: &Vector,
    w: &Vector,
    v: &Vector,
    alpha: f64,
    beta: f64,
    epsilon_guard: f64,
) -> Vector {
    let delta = w - v;
    let dist = delta.norm();
    if dist <= epsilon_guard {
        return grad.clone();
    }
    let coeff = alpha * dist * dist - beta / (dist * dist);
    let mut out = grad.clone();
    out.axpy(coeff / dist, &delta);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Burnin,
    Main,
}

/// Evolving optimizer state. `w` holds the displaced parameters; the true
/// parameters are `w - mu(t) m` (see [`NeumannOptimizer::finalize`]).
#[derive(Debug, Clone)]
pub struct NeumannState {
    pub w: Vector,
    pub m: Vector,
    pub v: Vector,
    pub t: u64,
    pub next_reset: u64,
    pub reset_period: u64,
    pub phase: Phase,
}

/// What one step did, for logging and tests.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub t: u64,
    pub phase: Phase,
    pub reset: bool,
    pub mu: f64,
    pub eta: f64,
    pub grad_norm: f64,
    pub update_norm: f64,
}

#[derive(Debug, Clone)]
pub struct NeumannOptimizer {
    hp: NeumannHyperParams,
    state: NeumannState,
    steps_per_epoch: usize,
    burnin_steps: u64,
}

impl NeumannOptimizer {
    pub fn new(
        w0: Vector,
        hp: NeumannHyperParams,
        steps_per_epoch: usize,
    ) -> Result<Self, OptimError> {
        hp.validate()?;
        if steps_per_epoch == 0 {
            return Err(OptimError::InvalidHyperParam(
                "steps_per_epoch must be at least 1".into(),
            ));
        }
        let burnin_steps = (hp.burnin_epochs * steps_per_epoch) as u64;
        let reset_period = (hp.k0_epochs * steps_per_epoch) as u64;
        let n = w0.len();
        let phase = if burnin_steps == 0 {
            Phase::Main
        } else {
            Phase::Burnin
        };
        Ok(Self {
            state: NeumannState {
                v: w0.clone(),
                m: Vector::zeros(n),
                w: w0,
                t: 0,
                next_reset: burnin_steps + 1,
                reset_period,
                phase,
            },
            hp,
            steps_per_epoch,
            burnin_steps,
        })
    }

    pub fn state(&self) -> &NeumannState {
        &self.state
    }

    pub fn hyperparams(&self) -> &NeumannHyperParams {
        &self.hp
    }

    pub fn steps_per_epoch(&self) -> usize {
        self.steps_per_epoch
    }

    pub fn mu_at(&self, t: u64) -> f64 {
        mu_at(t, &self.hp, self.steps_per_epoch)
    }

    /// The undisplaced parameters `w - mu(t) m`.
    pub fn finalize(&self) -> Vector {
        if self.state.t == 0 {
            return self.state.w.clone();
        }
        let mu = self.mu_at(self.state.t);
        let mut out = self.state.w.clone();
        out.axpy(-mu, &self.state.m);
        out
    }

    /// Takes one step on a freshly drawn batch. Dispatches to the SGD
    /// burn-in or the main Neumann update depending on phase.
    pub fn step(
        &mut self,
        model: &dyn LossModel,
        batch: &MiniBatch,
    ) -> Result<StepInfo, OptimError> {
        let t = self.state.t + 1;
        let grad = model.gradient(&self.state.w, batch);
        if !grad.is_finite() {
            return Err(OptimError::NonFiniteGradient { step: t });
        }
        self.state.t = t;
        match self.state.phase {
            Phase::Burnin => self.burn_in_step(t, &grad),
            Phase::Main => self.main_step(t, &grad),
        }
    }

    /// Vanilla SGD on the same learning-rate handle; `v` tracks `w` and the
    /// Neumann iterate stays zero. Transitions to the main phase once
    /// `burnin_epochs` worth of steps have run, scheduling an immediate
    /// reset.
    fn burn_in_step(&mut self, t: u64, grad: &Vector) -> Result<StepInfo, OptimError> {
        let eta = self.hp.eta.lr_at(t);
        sgd_update(&mut self.state.w, grad, eta);
        if !self.state.w.is_finite() {
            return Err(OptimError::Diverged {
                step: t,
                norm: f64::INFINITY,
            });
        }
        self.state.v = self.state.w.clone();
        if t >= self.burnin_steps {
            self.state.phase = Phase::Main;
            self.state.m.fill(0.0);
            self.state.next_reset = t + 1;
        }
        Ok(StepInfo {
            t,
            phase: Phase::Burnin,
            reset: false,
            mu: self.mu_at(t),
            eta,
            grad_norm: grad.norm(),
            update_norm: eta * grad.norm(),
        })
    }

    fn main_step(&mut self, t: u64, grad: &Vector) -> Result<StepInfo, OptimError> {
        let eta = self.hp.eta.lr_at(t);
        let mu = self.mu_at(t);
        let grad_norm = grad.norm();

        if t == self.state.next_reset {
            // Reset branch: reinitialize the iterate, leave w and v alone.
            self.state.m = grad.scale(-eta);
            self.state.next_reset = t + self.state.reset_period;
            if self.hp.k_doubling {
                self.state.reset_period *= 2;
            }
            self.check_divergence(t)?;
            return Ok(StepInfo {
                t,
                phase: Phase::Main,
                reset: true,
                mu,
                eta,
                grad_norm,
                update_norm: 0.0,
            });
        }

        // True parameters implied by the displaced bookkeeping.
        let mut w_implied = self.state.w.clone();
        w_implied.axpy(-mu, &self.state.m);

        let d = regularized_gradient(
            grad,
            &w_implied,
            &self.state.v,
            self.hp.alpha,
            self.hp.beta,
            self.hp.epsilon_guard,
        );

        // m <- mu m - eta d; w <- w + mu m' - eta d (m' the updated iterate).
        self.state.m.scale_mut(mu);
        self.state.m.axpy(-eta, &d);
        let mut update = self.state.m.scale(mu);
        update.axpy(-eta, &d);
        self.state.w.axpy(1.0, &update);

        // v <- w_implied + gamma (v - w_implied)
        for i in 0..self.state.v.len() {
            self.state.v[i] = w_implied[i] + self.hp.gamma * (self.state.v[i] - w_implied[i]);
        }

        self.check_divergence(t)?;
        Ok(StepInfo {
            t,
            phase: Phase::Main,
            reset: false,
            mu,
            eta,
            grad_norm,
            update_norm: update.norm(),
        })
    }

    fn check_divergence(&self, t: u64) -> Result<(), OptimError> {
        let m_norm = self.state.m.norm();
        if !self.state.m.is_finite() || !self.state.w.is_finite() || m_norm > DIVERGENCE_NORM {
            return Err(OptimError::Diverged { step: t, norm: m_norm });
        }
        Ok(())
    }
}

/// Difference between the gradient-evaluation form of the convexified
/// inner recurrence and its exact curvature form after `k_steps`.
#[derive(Debug, Clone)]
pub struct DirectionCheck {
    /// `gradient_form - matrix_form`, elementwise.
    pub difference: Vector,
    pub gradient_form: Vector,
    pub matrix_form: Vector,
}

/// Runs two copies of the inner recurrence from `m_0 = -eta grad(w)`:
/// one evaluating the gradient at the displaced point
/// (`m_k = mu m_{k-1} - eta grad(w + mu m_{k-1})`), one using the exact
/// Hessian-vector product of the same first-order expansion
/// (`m_k = mu m_{k-1} - eta (grad(w) + mu H m_{k-1})`).
///
/// On quadratic models the two agree to rounding; in general the gap is the
/// second-order Taylor remainder, O(||mu m||^2) per step.
pub fn convexified_direction_check(
    model: &dyn LossModel,
    w: &Vector,
    batch: &MiniBatch,
    mu: f64,
    eta: f64,
    k_steps: usize,
) -> Result<DirectionCheck, OptimError> {
    if !model.has_exact_hvp() {
        return Err(OptimError::ExactHvpRequired);
    }
    let g0 = model.gradient(w, batch);
    let mut m_grad = g0.scale(-eta);
    let mut m_matrix = m_grad.clone();
    for _ in 0..k_steps {
        let mut point = w.clone();
        point.axpy(mu, &m_grad);
        let g_displaced = model.gradient(&point, batch);
        m_grad.scale_mut(mu);
        m_grad.axpy(-eta, &g_displaced);

        let h_m = model.hvp(w, batch, &m_matrix);
        let mut linearized = g0.clone();
        linearized.axpy(mu, &h_m);
        m_matrix.scale_mut(mu);
        m_matrix.axpy(-eta, &linearized);
    }
    Ok(DirectionCheck {
        difference: &m_grad - &m_matrix,
        gradient_form: m_grad,
        matrix_form: m_matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use neumann_models::make_quadratic_problem;

    fn hp_for(n: usize, eta: f64) -> NeumannHyperParams {
        NeumannHyperParams::table_defaults(n, EtaSchedule::constant(eta, 10))
    }

    #[test]
    fn mu_schedule_endpoints() {
        let hp = hp_for(4, 0.1);
        // one epoch in: 1 - 1/2 = 0.5 = mu_min
        assert_abs_diff_eq!(mu_at(10, &hp, 10), 0.5);
        // nine epochs in: 1 - 1/10 = 0.9 = mu_max
        assert_abs_diff_eq!(mu_at(90, &hp, 10), 0.9);
        // later epochs clamp at the peak
        assert_abs_diff_eq!(mu_at(5000, &hp, 10), 0.9);
        // early steps clamp up to mu_min
        assert_abs_diff_eq!(mu_at(1, &hp, 10), 0.5);
    }

    #[test]
    fn regularizer_cancels_at_unit_distance_with_equal_coefficients() {
        let grad = Vector::zeros(3);
        let w = Vector::new(vec![1.0, 0.0, 0.0]);
        let v = Vector::zeros(3);
        let d = regularized_gradient(&grad, &w, &v, 1.0, 1.0, 1e-12);
        assert_eq!(d.norm(), 0.0);
    }

    #[test]
    fn regularizer_cubic_term_hand_evaluated() {
        // delta = 2 e1, alpha = 1, beta = 0: coefficient alpha ||d||^2 = 4
        // times the unit direction e1 gives 4 e1.
        let grad = Vector::zeros(2);
        let w = Vector::new(vec![2.0, 0.0]);
        let v = Vector::zeros(2);
        let d = regularized_gradient(&grad, &w, &v, 1.0, 0.0, 1e-12);
        assert_abs_diff_eq!(d[0], 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d[1], 0.0);
    }

    #[test]
    fn regularizer_guard_returns_gradient_unchanged() {
        let grad = Vector::new(vec![0.3, -0.4]);
        let w = Vector::new(vec![1.0, 1.0]);
        let d = regularized_gradient(&grad, &w, &w, 1.0, 1.0, 1e-12);
        assert_eq!(d, grad);
    }

    #[test]
    fn finalize_subtracts_displacement() {
        let hp = hp_for(2, 0.1);
        let mut opt = NeumannOptimizer::new(Vector::zeros(2), hp, 10).unwrap();
        // mu(t) at t=100 with spe=10 clamps to 0.9
        opt.state.t = 100;
        opt.state.m = Vector::new(vec![1.0, 0.0]);
        let out = opt.finalize();
        assert_abs_diff_eq!(out[0], -0.9, epsilon = 1e-15);
        assert_eq!(out[1], 0.0);
    }

    #[test]
    fn finalize_identity_when_m_zero() {
        let hp = hp_for(2, 0.1);
        let opt = NeumannOptimizer::new(Vector::new(vec![3.0, 4.0]), hp, 10).unwrap();
        assert_eq!(opt.finalize().as_slice(), &[3.0, 4.0]);
    }

    #[test]
    fn fixed_point_state_unchanged_except_step_counter() {
        // grad = 0, m = 0, w = v: only t should move.
        let w_star = Vector::new(vec![0.5, -0.5]);
        let p = make_quadratic_problem(&[1.0, 1.0], &w_star, 0.0, 4, 1).unwrap();
        let mut hp = hp_for(2, 0.2);
        hp.burnin_epochs = 0;
        let mut opt = NeumannOptimizer::new(w_star.clone(), hp, 2).unwrap();
        let batch = neumann_models::MiniBatch::full(p.dataset());
        for _ in 0..6 {
            opt.step(&p, &batch).unwrap();
        }
        assert_eq!(opt.state().w, w_star);
        assert_eq!(opt.state().m.norm(), 0.0);
        assert_eq!(opt.state().v, w_star);
        assert_eq!(opt.state().t, 6);
    }

    #[test]
    fn quadratic_direction_check_is_exact() {
        let w_star = Vector::new(vec![0.1, 0.2, 0.3]);
        let p = make_quadratic_problem(&[2.0, 1.0, 0.5], &w_star, 0.1, 8, 3).unwrap();
        let batch = neumann_models::MiniBatch::new(vec![0, 3, 5]).unwrap();
        let w = Vector::new(vec![1.0, -1.0, 0.5]);
        let check = convexified_direction_check(&p, &w, &batch, 0.9, 0.3, 5).unwrap();
        assert!(check.difference.norm() <= 1e-12, "{}", check.difference.norm());
    }

    #[test]
    fn mu_zero_direction_check_trivially_zero() {
        let w_star = Vector::zeros(2);
        let p = make_quadratic_problem(&[1.0, 0.5], &w_star, 0.0, 4, 9).unwrap();
        let batch = neumann_models::MiniBatch::full(p.dataset());
        let w = Vector::new(vec![0.7, -0.2]);
        let check = convexified_direction_check(&p, &w, &batch, 0.0, 0.4, 3).unwrap();
        assert_eq!(check.difference.norm(), 0.0);
    }
}
