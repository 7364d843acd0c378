//! Per-step training metrics and their CSV schema.

use crate::fmt_f64;

pub const METRICS_CSV_HEADER: &str =
    "step,epoch,train_loss,eval_loss,eval_acc,lr,mu,grad_norm,update_norm,wall_ms";

/// One metrics row. Eval columns are `None` (written empty, not zero)
/// except on epoch-boundary rows; `mu` is empty for optimizers without a
/// momentum coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub step: u64,
    pub epoch: f64,
    pub train_loss: f64,
    pub eval_loss: Option<f64>,
    pub eval_acc: Option<f64>,
    pub lr: f64,
    pub mu: Option<f64>,
    pub grad_norm: f64,
    pub update_norm: f64,
    pub wall_ms: f64,
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

impl MetricsRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.step,
            fmt_f64(self.epoch),
            fmt_f64(self.train_loss),
            opt(self.eval_loss),
            opt(self.eval_acc),
            fmt_f64(self.lr),
            opt(self.mu),
            fmt_f64(self.grad_norm),
            fmt_f64(self.update_norm),
            fmt_f64(self.wall_ms),
        )
    }
}
