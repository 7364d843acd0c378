//! Mechanics of the flattened Neumann optimizer: reset contract, doubling
//! reset periods, burn-in behavior, displaced-parameter consistency, and
//! the moving-average extremes.

use neumann_core::{finite_diff_grad, RngStream, Vector};
use neumann_models::{make_quadratic_problem, EpochSampler, LossModel, MiniBatch};
use neumann_optim::{
    regularized_gradient, BaselineConfig, BaselineKind, BaselineOptimizer, EtaSchedule,
    LrSchedule, NeumannHyperParams, NeumannOptimizer, Phase,
};

fn quadratic(dim: usize, n: usize, noise: f64, seed: u64) -> neumann_models::QuadraticProblem {
    let mut rng = RngStream::new(seed);
    let spectrum: Vec<f64> = (0..dim).map(|_| rng.uniform_in(0.2, 1.0)).collect();
    let w_star = rng.normal_vector(dim);
    make_quadratic_problem(&spectrum, &w_star, noise, n, seed).unwrap()
}

#[test]
fn reset_contract_m_equals_minus_eta_grad_exactly() {
    let p = quadratic(3, 20, 0.3, 11);
    let mut hp = NeumannHyperParams::table_defaults(3, EtaSchedule::constant(0.2, 4));
    hp.burnin_epochs = 1;
    hp.k0_epochs = 2; // resets every 8 steps
    let mut rng = RngStream::new(5);
    let w0 = rng.normal_vector(3);
    let mut opt = NeumannOptimizer::new(w0, hp, 4).unwrap();
    let mut sampler = EpochSampler::over_range(20, 5, RngStream::new(9)).unwrap();

    let mut resets_seen = 0;
    for _ in 0..40 {
        let batch = sampler.next_batch();
        let w_pre = opt.state().w.clone();
        let info = opt.step(&p, &batch).unwrap();
        if info.reset {
            resets_seen += 1;
            let expected = p.gradient(&w_pre, &batch).scale(-info.eta);
            assert_eq!(
                opt.state().m.as_slice(),
                expected.as_slice(),
                "reset at t={} not exactly -eta*grad",
                info.t
            );
        }
    }
    assert!(resets_seen >= 3, "expected several resets, saw {resets_seen}");
}

#[test]
fn reset_period_follows_table_doubling_in_epochs() {
    // steps_per_epoch = 1 so steps equal epochs: with the table defaults
    // (5-epoch burn-in, K0 = 10 epochs, doubling) resets must fire at
    // t = 6, 16, 36, 76, ... i.e. gaps of 10, 20, 40 epochs.
    let p = quadratic(2, 4, 0.0, 3);
    let hp = NeumannHyperParams::table_defaults(2, EtaSchedule::constant(0.1, 1));
    let mut opt = NeumannOptimizer::new(Vector::new(vec![1.0, -1.0]), hp, 1).unwrap();
    let batch = MiniBatch::full(p.dataset());

    let mut reset_steps = Vec::new();
    for _ in 0..160 {
        let info = opt.step(&p, &batch).unwrap();
        if info.reset {
            reset_steps.push(info.t);
        }
    }
    assert_eq!(reset_steps, vec![6, 16, 36, 76, 156]);
    let gaps: Vec<u64> = reset_steps.windows(2).map(|w| w[1] - w[0]).collect();
    assert_eq!(gaps, vec![10, 20, 40, 80]);
}

#[test]
fn doubling_disabled_keeps_period_constant() {
    let p = quadratic(2, 4, 0.0, 3);
    let mut hp = NeumannHyperParams::table_defaults(2, EtaSchedule::constant(0.1, 1));
    hp.burnin_epochs = 0;
    hp.k0_epochs = 5;
    hp.k_doubling = false;
    let mut opt = NeumannOptimizer::new(Vector::new(vec![1.0, -1.0]), hp, 1).unwrap();
    let batch = MiniBatch::full(p.dataset());
    let mut reset_steps = Vec::new();
    for _ in 0..26 {
        let info = opt.step(&p, &batch).unwrap();
        if info.reset {
            reset_steps.push(info.t);
        }
    }
    assert_eq!(reset_steps, vec![1, 6, 11, 16, 21, 26]);
}

#[test]
fn burn_in_is_bitwise_sgd_and_transitions_on_schedule() {
    let p = quadratic(4, 24, 0.5, 21);
    let spe = 6; // 24 samples / batch 4
    let lr = LrSchedule {
        base_lr: 0.3,
        warmup_epochs: 2,
        decay_every_epochs: 0,
        decay_factor: 1.0,
        steps_per_epoch: spe,
    };
    let hp = NeumannHyperParams::table_defaults(4, EtaSchedule::Staircase(lr.clone()));
    let burnin_steps = hp.burnin_epochs * spe;

    let mut rng = RngStream::new(2);
    let w0 = rng.normal_vector(4);
    let mut opt = NeumannOptimizer::new(w0.clone(), hp, spe).unwrap();
    let mut sgd = BaselineOptimizer::new(BaselineConfig::new(BaselineKind::Sgd), 4);
    let mut w_sgd = w0;

    let mut sampler_a = EpochSampler::over_range(24, 4, RngStream::new(77)).unwrap();
    let mut sampler_b = EpochSampler::over_range(24, 4, RngStream::new(77)).unwrap();

    for t in 1..=burnin_steps as u64 {
        let batch_a = sampler_a.next_batch();
        let batch_b = sampler_b.next_batch();
        assert_eq!(batch_a, batch_b);

        assert_eq!(opt.state().phase, Phase::Burnin);
        assert_eq!(opt.state().m.norm(), 0.0, "m must stay zero in burn-in");
        let info = opt.step(&p, &batch_a).unwrap();
        let g = p.gradient(&w_sgd, &batch_b);
        sgd.step(&mut w_sgd, &g, lr.lr_at(t)).unwrap();
        assert_eq!(
            opt.state().w.as_slice(),
            w_sgd.as_slice(),
            "burn-in step {t} diverged from plain SGD"
        );
        assert_eq!(info.phase, Phase::Burnin);
    }
    assert_eq!(opt.state().phase, Phase::Main);
    // Finalize of a burn-in-only state returns w unchanged (m is zero).
    assert_eq!(opt.finalize().as_slice(), opt.state().w.as_slice());

    // The first main-phase step is a reset.
    let batch = sampler_a.next_batch();
    let info = opt.step(&p, &batch).unwrap();
    assert!(info.reset);
    assert_eq!(info.t, burnin_steps as u64 + 1);
}

/// Shadow copy replaying the update in undisplaced form.
///
/// The displaced bookkeeping maintains `w = u + mu(t) m` where `mu(t)` is
/// the mu of the most recent step. When mu changes between steps the
/// decomposition is re-interpreted with the new mu, which shifts the
/// implied true parameters by `(mu_prev - mu_now) m` -- a pure bookkeeping
/// re-anchor that the shadow replays too. The shadow's `u` otherwise
/// evolves only by adding the freshly computed iterate (`u += m_new`),
/// never by reading `w`, so the check below genuinely cross-validates the
/// optimizer's weight arithmetic.
struct Shadow {
    u: Option<Vector>,
    mu_used: f64,
}

impl Shadow {
    fn new() -> Self {
        Self {
            u: None,
            mu_used: 0.0,
        }
    }
}

fn run_displacement_check(mu_min: f64, mu_max: f64) -> f64 {
    let p = quadratic(3, 30, 0.4, 8);
    let mut hp = NeumannHyperParams::table_defaults(3, EtaSchedule::constant(0.15, 5));
    hp.burnin_epochs = 1;
    hp.k0_epochs = 3;
    hp.mu_min = mu_min;
    hp.mu_max = mu_max;
    let guard = hp.epsilon_guard;
    let (alpha, beta) = (hp.alpha, hp.beta);
    let mut opt = NeumannOptimizer::new(RngStream::new(4).normal_vector(3), hp, 5).unwrap();
    let mut sampler = EpochSampler::over_range(30, 6, RngStream::new(13)).unwrap();

    let mut shadow = Shadow::new();
    let mut worst: f64 = 0.0;
    for _ in 0..120 {
        let batch = sampler.next_batch();
        let w_pre = opt.state().w.clone();
        let m_pre = opt.state().m.clone();
        let v_pre = opt.state().v.clone();
        let phase_pre = opt.state().phase;
        let info = opt.step(&p, &batch).unwrap();

        if phase_pre == Phase::Burnin || info.reset {
            shadow.u = None; // resets re-anchor the displacement
            continue;
        }
        match shadow.u.take() {
            None => {
                // First else-step after a reset: define the true params.
                let mut u = w_pre.clone();
                u.axpy(-info.mu, &m_pre);
                // Replay this step: m' = mu m - eta d; u' = u + m'.
                let d = replay_direction(&p, &w_pre, &m_pre, &v_pre, info.mu, alpha, beta, guard, &batch);
                let mut m_new = m_pre.scale(info.mu);
                m_new.axpy(-info.eta, &d);
                u.axpy(1.0, &m_new);
                shadow.u = Some(u);
                shadow.mu_used = info.mu;
            }
            Some(mut u) => {
                // Re-anchor for the mu change, then check the stored-form
                // invariant w = u + mu m before replaying.
                u.axpy(shadow.mu_used - info.mu, &m_pre);
                let mut expect_w = u.clone();
                expect_w.axpy(info.mu, &m_pre);
                worst = worst.max((&w_pre - &expect_w).norm());

                let d = replay_direction(&p, &w_pre, &m_pre, &v_pre, info.mu, alpha, beta, guard, &batch);
                let mut m_new = m_pre.scale(info.mu);
                m_new.axpy(-info.eta, &d);
                u.axpy(1.0, &m_new);
                // And after replaying, the displaced weights must match.
                let mut expect_w_post = u.clone();
                expect_w_post.axpy(info.mu, &m_new);
                worst = worst.max((&opt.state().w - &expect_w_post).norm());
                shadow.u = Some(u);
                shadow.mu_used = info.mu;
            }
        }
    }
    worst
}

#[allow(clippy::too_many_arguments)]
fn replay_direction(
    p: &neumann_models::QuadraticProblem,
    w_pre: &Vector,
    m_pre: &Vector,
    v_pre: &Vector,
    mu: f64,
    alpha: f64,
    beta: f64,
    guard: f64,
    batch: &MiniBatch,
) -> Vector {
    let g = p.gradient(w_pre, batch);
    let mut w_implied = w_pre.clone();
    w_implied.axpy(-mu, m_pre);
    regularized_gradient(&g, &w_implied, v_pre, alpha, beta, guard)
}

#[test]
fn displacement_consistency_constant_mu() {
    let worst = run_displacement_check(0.7, 0.7);
    assert!(worst <= 1e-10, "shadow defect {worst}");
}

#[test]
fn displacement_consistency_varying_mu() {
    let worst = run_displacement_check(0.5, 0.9);
    assert!(worst <= 1e-10, "shadow defect {worst}");
}

#[test]
fn moving_average_tracks_implied_weights_when_gamma_zero() {
    let p = quadratic(2, 12, 0.2, 6);
    let mut hp = NeumannHyperParams::table_defaults(2, EtaSchedule::constant(0.1, 3));
    hp.burnin_epochs = 0;
    hp.gamma = 0.0;
    let mut opt = NeumannOptimizer::new(Vector::new(vec![2.0, -2.0]), hp, 3).unwrap();
    let mut sampler = EpochSampler::over_range(12, 4, RngStream::new(3)).unwrap();
    for _ in 0..30 {
        let batch = sampler.next_batch();
        let w_pre = opt.state().w.clone();
        let m_pre = opt.state().m.clone();
        let info = opt.step(&p, &batch).unwrap();
        if !info.reset {
            let mut w_implied = w_pre;
            w_implied.axpy(-info.mu, &m_pre);
            assert_eq!(
                opt.state().v.as_slice(),
                w_implied.as_slice(),
                "gamma=0 must pin v to the implied weights"
            );
        }
    }
}

#[test]
fn moving_average_nearly_frozen_as_gamma_approaches_one() {
    let p = quadratic(2, 12, 0.2, 6);
    let mut hp = NeumannHyperParams::table_defaults(2, EtaSchedule::constant(0.1, 3));
    hp.burnin_epochs = 0;
    hp.gamma = 1.0 - 1e-12;
    let w0 = Vector::new(vec![2.0, -2.0]);
    let mut opt = NeumannOptimizer::new(w0.clone(), hp, 3).unwrap();
    let mut sampler = EpochSampler::over_range(12, 4, RngStream::new(3)).unwrap();
    for _ in 0..60 {
        let batch = sampler.next_batch();
        opt.step(&p, &batch).unwrap();
    }
    let drift = (&opt.state().v - &w0).norm();
    assert!(drift < 1e-8, "v drifted {drift} despite gamma ~ 1");
}

#[test]
fn regularizer_gradient_matches_finite_difference_of_energy() {
    // E(w) = alpha/3 ||w-v||^3 + beta / ||w-v||
    let mut rng = RngStream::new(40);
    for trial in 0..20 {
        let dim = 4;
        let v = rng.normal_vector(dim);
        let direction = rng.unit_vector(dim);
        let radius = rng.uniform_in(0.1, 10.0);
        let mut w = v.clone();
        w.axpy(radius, &direction);
        let (alpha, beta) = (rng.uniform_in(0.1, 2.0), rng.uniform_in(0.1, 2.0));
        // Skip draws where the attractive and repulsive terms nearly cancel;
        // relative error is meaningless at a zero of the coefficient.
        let coeff = alpha * radius * radius - beta / (radius * radius);
        if coeff.abs() < 0.05 * (alpha * radius * radius + beta / (radius * radius)) {
            continue;
        }

        let zero = Vector::zeros(dim);
        let analytic = regularized_gradient(&zero, &w, &v, alpha, beta, 1e-12);
        let energy = |x: &Vector| {
            let d = (x - &v).norm();
            alpha / 3.0 * d.powi(3) + beta / d
        };
        let numeric = finite_diff_grad(energy, &w, 1e-6).unwrap();
        let rel = (&analytic - &numeric).norm() / analytic.norm().max(numeric.norm());
        assert!(rel < 1e-5, "trial {trial}: relative error {rel}");
    }
}
