//! Experiment harness: plain-text configs, training-loop orchestration,
//! metrics CSVs, binary checkpoints, optimizer comparison reports, and the
//! eigenvalue trajectory probe, all behind the `neumann` CLI.

pub mod checkpoint;
pub mod compare;
pub mod config;
pub mod eigenprobe;
pub mod glob;
pub mod gradcheck;
pub mod metrics;
pub mod train;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CheckpointError};
pub use compare::{run_compare, CompareEntry, CompareOutcome};
pub use config::{
    parse_config, parse_config_str, ConfigError, ExperimentConfig, LrConfig, NeumannSettings,
    OptimizerChoice,
};
pub use eigenprobe::run_eigenprobe;
pub use gradcheck::{run_gradcheck, GradCheckReport};
pub use metrics::{MetricsRow, METRICS_CSV_HEADER};
pub use train::{run_train, RunSummary};

use thiserror::Error;

/// Environment variable naming the default output directory when neither
/// the config nor the CLI provides one.
pub const OUT_DIR_ENV: &str = "NEUMANN_OUT_DIR";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Core(#[from] neumann_core::CoreError),

    #[error(transparent)]
    Model(#[from] neumann_models::ModelError),

    #[error(transparent)]
    Optim(#[from] neumann_optim::OptimError),

    #[error(transparent)]
    Probe(#[from] neumann_probe::ProbeError),

    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

/// CLI exit code: 0 completed, 2 config error, 3 divergence, 1 otherwise.
/// Divergence is reported through `RunSummary::diverged`; this covers the
/// error paths.
impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Model(_) | HarnessError::Usage(_) => 2,
            HarnessError::Optim(e) => match e {
                neumann_optim::OptimError::Diverged { .. }
                | neumann_optim::OptimError::NonFiniteGradient { .. } => 3,
                _ => 2,
            },
            _ => 1,
        }
    }
}

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Shortest-roundtrip decimal form; `NaN`/`inf` spelled stably.
pub(crate) fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x}")
    }
}
