//! Training-loop orchestration: burn-in + main phase (or a baseline loop),
//! per-step metrics, per-epoch eval, checkpoints, and a run summary.

use crate::checkpoint::{write_checkpoint, Checkpoint};
use crate::config::{train_split_size, ExperimentConfig, OptimizerChoice};
use crate::metrics::{MetricsRow, METRICS_CSV_HEADER};
use crate::{io_err, HarnessError};
use neumann_core::{RngStream, Vector};
use neumann_models::{Dataset, DatasetKind, EpochSampler, LossModel, MiniBatch};
use neumann_optim::{
    BaselineOptimizer, EtaSchedule, LrSchedule, NeumannHyperParams, NeumannOptimizer, OptimError,
};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Debug)]
pub struct RunSummary {
    pub optimizer_name: String,
    pub rows: Vec<MetricsRow>,
    pub final_weights: Vector,
    pub final_train_loss: f64,
    pub final_eval_loss: Option<f64>,
    pub final_eval_acc: Option<f64>,
    pub total_steps: u64,
    pub steps_per_epoch: usize,
    pub diverged: bool,
    pub metrics_path: PathBuf,
    pub checkpoint_path: PathBuf,
}

enum Driver {
    Neumann(NeumannOptimizer),
    Baseline {
        opt: BaselineOptimizer,
        schedule: LrSchedule,
        w: Vector,
    },
}

struct StepView {
    lr: f64,
    mu: Option<f64>,
    grad_norm: f64,
    update_norm: f64,
}

impl Driver {
    fn report_weights(&self) -> Vector {
        match self {
            Driver::Neumann(opt) => opt.finalize(),
            Driver::Baseline { w, .. } => w.clone(),
        }
    }

    fn step(
        &mut self,
        model: &dyn LossModel,
        batch: &MiniBatch,
        t: u64,
    ) -> Result<StepView, OptimError> {
        match self {
            Driver::Neumann(opt) => {
                let info = opt.step(model, batch)?;
                Ok(StepView {
                    lr: info.eta,
                    mu: Some(info.mu),
                    grad_norm: info.grad_norm,
                    update_norm: info.update_norm,
                })
            }
            Driver::Baseline { opt, schedule, w } => {
                let lr = schedule.lr_at(t);
                let grad = model.gradient(w, batch);
                if !grad.is_finite() {
                    return Err(OptimError::NonFiniteGradient { step: t });
                }
                let grad_norm = grad.norm();
                let update_norm = opt.step(w, &grad, lr)?;
                if !w.is_finite() || w.norm() > neumann_optim::DIVERGENCE_NORM {
                    return Err(OptimError::Diverged {
                        step: t,
                        norm: w.norm(),
                    });
                }
                let mu = match opt.kind() {
                    neumann_optim::BaselineKind::Momentum => Some(opt.config().momentum_mu),
                    _ => None,
                };
                Ok(StepView {
                    lr,
                    mu,
                    grad_norm,
                    update_norm,
                })
            }
        }
    }
}

fn eval_split(n: usize, eval_fraction: f64, rng: &RngStream) -> (Vec<usize>, Vec<usize>) {
    let mut indices: Vec<usize> = (0..n).collect();
    let mut split_rng = rng.substream("split", 0);
    split_rng.shuffle(&mut indices);
    let train_len = train_split_size(n, eval_fraction);
    let eval = indices.split_off(train_len);
    (indices, eval)
}

fn accuracy(model: &dyn LossModel, w: &Vector, dataset: &Dataset, indices: &[usize]) -> f64 {
    let mut correct = 0usize;
    for &i in indices {
        let s = dataset.sample(i);
        let predicted = if model.predict(w, &s.features) >= 0.5 { 1.0 } else { 0.0 };
        if predicted == s.target {
            correct += 1;
        }
    }
    correct as f64 / indices.len() as f64
}

/// Runs one experiment end to end, writing `metrics.csv`, checkpoints, and
/// `summary.txt` under the resolved output directory.
///
/// Divergence or a non-finite loss halts the run, keeps the partial
/// metrics (with a final failure row), and is reported through
/// `RunSummary::diverged` rather than an error.
pub fn run_train(cfg: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
    let model = cfg.problem.build()?;
    let model: &dyn LossModel = model.as_ref();
    let n = model.dataset().len();
    let root_rng = RngStream::new(cfg.seed);

    let (train_idx, eval_idx) = eval_split(n, cfg.eval_fraction, &root_rng);
    if cfg.batch_size > train_idx.len() {
        return Err(HarnessError::Usage(format!(
            "batch_size {} exceeds training split {}",
            cfg.batch_size,
            train_idx.len()
        )));
    }
    let steps_per_epoch = train_idx.len() / cfg.batch_size;
    let total_steps = (cfg.epochs * steps_per_epoch) as u64;

    let mut init_rng = root_rng.substream("init", 0);
    let w0 = model.init_weights(&mut init_rng);

    let optimizer_name = cfg.optimizer.name().to_string();
    let mut driver = match &cfg.optimizer {
        OptimizerChoice::Neumann(settings) => {
            let schedule = LrSchedule {
                base_lr: cfg.lr.base,
                warmup_epochs: cfg.lr.warmup_epochs,
                decay_every_epochs: cfg.lr.decay_every_epochs,
                decay_factor: cfg.lr.decay_factor,
                steps_per_epoch,
            };
            let eta = if settings.inverse_t_eta {
                EtaSchedule::InverseT {
                    eta0: cfg.lr.base,
                    steps_per_epoch,
                }
            } else {
                EtaSchedule::Staircase(schedule)
            };
            let hp = NeumannHyperParams {
                eta,
                alpha: settings.alpha,
                beta: settings.beta_per_var * model.param_count() as f64,
                gamma: settings.gamma,
                mu_min: settings.mu_min,
                mu_max: settings.mu_max,
                burnin_epochs: settings.burnin_epochs,
                k0_epochs: settings.k0_epochs,
                k_doubling: settings.k_doubling,
                epsilon_guard: 1e-12 * (model.param_count() as f64).sqrt(),
            };
            Driver::Neumann(NeumannOptimizer::new(w0, hp, steps_per_epoch)?)
        }
        OptimizerChoice::Baseline(bc) => Driver::Baseline {
            opt: BaselineOptimizer::new(bc.clone(), model.param_count()),
            schedule: LrSchedule {
                base_lr: cfg.lr.base,
                warmup_epochs: cfg.lr.warmup_epochs,
                decay_every_epochs: cfg.lr.decay_every_epochs,
                decay_factor: cfg.lr.decay_factor,
                steps_per_epoch,
            },
            w: w0,
        },
    };

    let out_dir = cfg.resolved_output_dir();
    std::fs::create_dir_all(&out_dir).map_err(|e| io_err(&out_dir, e))?;
    let metrics_tmp = out_dir.join("metrics.csv.tmp");
    let metrics_path = out_dir.join("metrics.csv");
    let mut metrics_file =
        std::io::BufWriter::new(std::fs::File::create(&metrics_tmp).map_err(|e| io_err(&metrics_tmp, e))?);
    writeln!(metrics_file, "{METRICS_CSV_HEADER}").map_err(|e| io_err(&metrics_tmp, e))?;

    let mut sampler = EpochSampler::new(
        train_idx.clone(),
        cfg.batch_size,
        root_rng.substream("batches", 0),
    )?;

    let classification = model.dataset().kind() == DatasetKind::Classification;
    let mut rows: Vec<MetricsRow> = Vec::with_capacity(total_steps as usize);
    let mut diverged = false;

    for t in 1..=total_steps {
        let batch = sampler.next_batch();
        let started = Instant::now();

        let w_report_pre = driver.report_weights();
        let train_loss = model.loss(&w_report_pre, &batch);
        if !train_loss.is_finite() {
            rows.push(failure_row(t, steps_per_epoch, train_loss));
            diverged = true;
            break;
        }

        let view = match driver.step(model, &batch, t) {
            Ok(view) => view,
            Err(OptimError::Diverged { .. }) | Err(OptimError::NonFiniteGradient { .. }) => {
                rows.push(failure_row(t, steps_per_epoch, f64::NAN));
                diverged = true;
                break;
            }
            Err(other) => return Err(other.into()),
        };

        let epoch_end = t % steps_per_epoch as u64 == 0;
        let (eval_loss, eval_acc) = if epoch_end && !eval_idx.is_empty() {
            let w_post = driver.report_weights();
            let eval_batch = MiniBatch::new(eval_idx.clone()).expect("eval split nonempty");
            let loss = model.loss(&w_post, &eval_batch);
            let acc = classification.then(|| accuracy(model, &w_post, model.dataset(), &eval_idx));
            (Some(loss), acc)
        } else {
            (None, None)
        };

        let wall_ms = if cfg.deterministic {
            0.0
        } else {
            started.elapsed().as_secs_f64() * 1e3
        };
        rows.push(MetricsRow {
            step: t,
            epoch: t as f64 / steps_per_epoch as f64,
            train_loss,
            eval_loss,
            eval_acc,
            lr: view.lr,
            mu: view.mu,
            grad_norm: view.grad_norm,
            update_norm: view.update_norm,
            wall_ms,
        });

        if epoch_end && cfg.checkpoint_every_epochs > 0 {
            let epoch = (t / steps_per_epoch as u64) as usize;
            if epoch % cfg.checkpoint_every_epochs == 0 {
                let path = out_dir.join(format!("ckpt_{t:08}.ckpt"));
                write_checkpoint(
                    &path,
                    &Checkpoint {
                        weights: driver.report_weights(),
                        optimizer: optimizer_name.clone(),
                        step: t,
                    },
                )?;
            }
        }
    }

    for row in &rows {
        writeln!(metrics_file, "{}", row.to_csv()).map_err(|e| io_err(&metrics_tmp, e))?;
    }
    metrics_file.flush().map_err(|e| io_err(&metrics_tmp, e))?;
    drop(metrics_file);
    std::fs::rename(&metrics_tmp, &metrics_path).map_err(|e| io_err(&metrics_path, e))?;

    let final_weights = driver.report_weights();
    let train_batch = MiniBatch::new(train_idx).expect("training split nonempty");
    let final_train_loss = model.loss(&final_weights, &train_batch);
    let (final_eval_loss, final_eval_acc) = if eval_idx.is_empty() {
        (None, None)
    } else {
        let eval_batch = MiniBatch::new(eval_idx.clone()).expect("nonempty");
        let loss = model.loss(&final_weights, &eval_batch);
        let acc = classification.then(|| accuracy(model, &final_weights, model.dataset(), &eval_idx));
        (Some(loss), acc)
    };

    let checkpoint_path = out_dir.join("final.ckpt");
    write_checkpoint(
        &checkpoint_path,
        &Checkpoint {
            weights: final_weights.clone(),
            optimizer: optimizer_name.clone(),
            step: rows.last().map_or(0, |r| r.step),
        },
    )?;

    let summary = RunSummary {
        optimizer_name,
        total_steps: rows.last().map_or(0, |r| r.step),
        steps_per_epoch,
        final_weights,
        final_train_loss,
        final_eval_loss,
        final_eval_acc,
        diverged,
        rows,
        metrics_path,
        checkpoint_path,
    };
    write_summary(&out_dir, cfg, &summary)?;
    Ok(summary)
}

fn failure_row(t: u64, steps_per_epoch: usize, loss: f64) -> MetricsRow {
    MetricsRow {
        step: t,
        epoch: t as f64 / steps_per_epoch as f64,
        train_loss: loss,
        eval_loss: None,
        eval_acc: None,
        lr: f64::NAN,
        mu: None,
        grad_norm: f64::NAN,
        update_norm: f64::NAN,
        wall_ms: 0.0,
    }
}

fn write_summary(
    out_dir: &std::path::Path,
    cfg: &ExperimentConfig,
    s: &RunSummary,
) -> Result<(), HarnessError> {
    let path = out_dir.join("summary.txt");
    let tmp = out_dir.join("summary.txt.tmp");
    let mut text = String::new();
    text.push_str(&format!("optimizer = {}\n", s.optimizer_name));
    text.push_str(&format!("problem = {}\n", cfg.problem.family()));
    text.push_str(&format!("seed = {}\n", cfg.seed));
    text.push_str(&format!("total_steps = {}\n", s.total_steps));
    text.push_str(&format!("steps_per_epoch = {}\n", s.steps_per_epoch));
    text.push_str(&format!("final_train_loss = {}\n", crate::fmt_f64(s.final_train_loss)));
    if let Some(l) = s.final_eval_loss {
        text.push_str(&format!("final_eval_loss = {}\n", crate::fmt_f64(l)));
    }
    if let Some(a) = s.final_eval_acc {
        text.push_str(&format!("final_eval_acc = {}\n", crate::fmt_f64(a)));
    }
    text.push_str(&format!("diverged = {}\n", s.diverged));
    std::fs::write(&tmp, text).map_err(|e| io_err(&tmp, e))?;
    std::fs::rename(&tmp, &path).map_err(|e| io_err(&path, e))?;
    Ok(())
}
