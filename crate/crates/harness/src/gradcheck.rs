//! Finite-difference gradient/HVP verification for a configured problem.

use crate::config::ExperimentConfig;
use crate::HarnessError;
use neumann_core::RngStream;
use neumann_models::{gradient_check, hvp_check, MiniBatch};

pub const GRAD_TOL: f64 = 1e-5;
pub const HVP_TOL: f64 = 1e-4;

#[derive(Debug)]
pub struct GradCheckReport {
    /// (point index, gradient relative error, hvp relative error)
    pub rows: Vec<(usize, f64, f64)>,
    pub pass: bool,
}

pub fn run_gradcheck(cfg: &ExperimentConfig, points: usize) -> Result<GradCheckReport, HarnessError> {
    let model = cfg.problem.build()?;
    let model = model.as_ref();
    let n = model.param_count();
    let mut rng = RngStream::new(cfg.seed).substream("gradcheck", 0);
    let batch_size = cfg.batch_size.min(model.dataset().len());
    let batch = MiniBatch::sample(model.dataset().len(), batch_size, &mut rng)?;

    let mut rows = Vec::with_capacity(points);
    let mut pass = true;
    for i in 0..points {
        let mut w = model.init_weights(&mut rng);
        w.axpy(0.5, &rng.normal_vector(n));
        let ge = gradient_check(model, &w, &batch)?;
        let v = rng.normal_vector(n);
        let he = hvp_check(model, &w, &batch, &v)?;
        pass &= ge < GRAD_TOL && he < HVP_TOL;
        rows.push((i, ge, he));
    }
    Ok(GradCheckReport { rows, pass })
}
