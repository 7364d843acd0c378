//! Plain-text experiment configuration: one `key = value` per line, `#`
//! comments, dotted keys for nesting. Unset Neumann keys fall back to the
//! hyperparameters that work across models (cubic 1e-7, repulsive 1e-5 per
//! variable, gamma 0.99, mu in [0.5, 0.9], 5-epoch burn-in, 10-epoch
//! doubling resets).

use neumann_core::RngStream;
use neumann_models::ProblemSpec;
use neumann_optim::{BaselineConfig, BaselineKind};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`, got {text:?}")]
    Syntax {
        path: String,
        line: usize,
        text: String,
    },

    #[error("{path}:{line}: unknown key {key:?}{suggestion}")]
    UnknownKey {
        path: String,
        line: usize,
        key: String,
        suggestion: String,
    },

    #[error("{path}:{line}: {key}: {message}")]
    InvalidValue {
        path: String,
        line: usize,
        key: String,
        message: String,
    },

    #[error("{path}: missing required key {key:?}")]
    Missing { path: String, key: String },

    #[error("{path}: {message}")]
    Invalid { path: String, message: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LrConfig {
    pub base: f64,
    pub warmup_epochs: usize,
    pub decay_every_epochs: usize,
    pub decay_factor: f64,
}

impl Default for LrConfig {
    fn default() -> Self {
        Self {
            base: 0.1,
            warmup_epochs: 0,
            decay_every_epochs: 0,
            decay_factor: 1.0,
        }
    }
}

/// Neumann hyperparameters as configured; `beta_per_var` is scaled by the
/// parameter count when the optimizer is built.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannSettings {
    pub alpha: f64,
    pub beta_per_var: f64,
    pub gamma: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub burnin_epochs: usize,
    pub k0_epochs: usize,
    pub k_doubling: bool,
    /// Use the 1/t learning-rate mode instead of the staircase schedule.
    pub inverse_t_eta: bool,
}

impl Default for NeumannSettings {
    fn default() -> Self {
        Self {
            alpha: 1e-7,
            beta_per_var: 1e-5,
            gamma: 0.99,
            mu_min: 0.5,
            mu_max: 0.9,
            burnin_epochs: 5,
            k0_epochs: 10,
            k_doubling: true,
            inverse_t_eta: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerChoice {
    Neumann(NeumannSettings),
    Baseline(BaselineConfig),
}

impl OptimizerChoice {
    pub fn name(&self) -> &'static str {
        match self {
            OptimizerChoice::Neumann(_) => "neumann",
            OptimizerChoice::Baseline(b) => b.kind.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub optimizer: OptimizerChoice,
    pub lr: LrConfig,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub eval_fraction: f64,
    pub output_dir: Option<PathBuf>,
    pub deterministic: bool,
    /// Write a checkpoint every this many epochs (0 = final only).
    pub checkpoint_every_epochs: usize,
}

impl ExperimentConfig {
    /// Output directory: config value, else `NEUMANN_OUT_DIR`, else `runs`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        if let Some(dir) = &self.output_dir {
            return dir.clone();
        }
        if let Ok(env_dir) = std::env::var(crate::OUT_DIR_ENV) {
            if !env_dir.is_empty() {
                return PathBuf::from(env_dir);
            }
        }
        PathBuf::from("runs")
    }
}

const KNOWN_KEYS: &[&str] = &[
    "problem",
    "problem.dim",
    "problem.samples",
    "problem.noise",
    "problem.condition",
    "problem.spectrum",
    "problem.separation",
    "problem.hidden",
    "optimizer",
    "neumann.alpha",
    "neumann.beta",
    "neumann.gamma",
    "neumann.mu_min",
    "neumann.mu_max",
    "neumann.burnin_epochs",
    "neumann.k0_epochs",
    "neumann.k_doubling",
    "neumann.eta_mode",
    "momentum.mu",
    "adam.beta1",
    "adam.beta2",
    "adam.epsilon",
    "rmsprop.rho",
    "rmsprop.epsilon",
    "lr.base",
    "lr.warmup_epochs",
    "lr.decay_every_epochs",
    "lr.decay_factor",
    "batch_size",
    "epochs",
    "seed",
    "eval_fraction",
    "output_dir",
    "deterministic",
    "checkpoint_every_epochs",
];

// Bare Neumann hyperparameter names are accepted as shorthand.
const ALIASES: &[(&str, &str)] = &[
    ("alpha", "neumann.alpha"),
    ("beta", "neumann.beta"),
    ("gamma", "neumann.gamma"),
    ("mu_min", "neumann.mu_min"),
    ("mu_max", "neumann.mu_max"),
];

fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            cur[j] = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn suggest(key: &str) -> String {
    let mut best: Option<(usize, &str)> = None;
    for candidate in KNOWN_KEYS {
        let d = edit_distance(key, candidate);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, candidate));
        }
    }
    match best {
        Some((d, candidate)) if d <= 3 => format!("; did you mean {candidate:?}?"),
        _ => String::new(),
    }
}

#[derive(Default)]
struct ProblemDraft {
    family: Option<String>,
    dim: Option<usize>,
    samples: Option<usize>,
    noise: f64,
    condition: Option<f64>,
    spectrum: Option<Vec<f64>>,
    separation: f64,
    hidden: usize,
}

struct Parser<'a> {
    path: String,
    line: usize,
    key: &'a str,
}

impl Parser<'_> {
    fn invalid(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::InvalidValue {
            path: self.path.clone(),
            line: self.line,
            key: self.key.to_string(),
            message: message.into(),
        }
    }

    fn f64(&self, v: &str) -> Result<f64, ConfigError> {
        v.parse()
            .map_err(|_| self.invalid(format!("expected a number, got {v:?}")))
    }

    fn usize(&self, v: &str) -> Result<usize, ConfigError> {
        v.parse()
            .map_err(|_| self.invalid(format!("expected a nonnegative integer, got {v:?}")))
    }

    fn u64(&self, v: &str) -> Result<u64, ConfigError> {
        v.parse()
            .map_err(|_| self.invalid(format!("expected an integer, got {v:?}")))
    }

    fn bool(&self, v: &str) -> Result<bool, ConfigError> {
        match v {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(self.invalid(format!("expected true/false, got {v:?}"))),
        }
    }
}

/// Parses a config file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text, &path.display().to_string())
}

/// Parses config text; `origin` names the source in errors.
pub fn parse_config_str(text: &str, origin: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut problem = ProblemDraft {
        separation: 2.0,
        hidden: 8,
        ..ProblemDraft::default()
    };
    let mut optimizer_name: Option<String> = None;
    let mut neumann = NeumannSettings::default();
    let mut baseline_over = BaselineConfig::new(BaselineKind::Sgd);
    let mut lr = LrConfig::default();
    let mut batch_size = 32usize;
    let mut epochs = 10usize;
    let mut seed = 42u64;
    let mut eval_fraction = 0.1f64;
    let mut output_dir: Option<PathBuf> = None;
    let mut deterministic = true;
    let mut checkpoint_every = 0usize;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((key_raw, value_raw)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                path: origin.to_string(),
                line: line_no,
                text: raw_line.trim().to_string(),
            });
        };
        let mut key = key_raw.trim();
        let value = value_raw.trim();
        if let Some((_, canonical)) = ALIASES.iter().find(|(alias, _)| *alias == key) {
            key = canonical;
        }
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                path: origin.to_string(),
                line: line_no,
                key: key_raw.trim().to_string(),
                suggestion: suggest(key_raw.trim()),
            });
        }
        let p = Parser {
            path: origin.to_string(),
            line: line_no,
            key,
        };
        match key {
            "problem" => match value {
                "quadratic" | "logistic" | "mlp" => problem.family = Some(value.to_string()),
                _ => {
                    return Err(p.invalid(format!(
                        "unknown problem family {value:?} (quadratic|logistic|mlp)"
                    )))
                }
            },
            "problem.dim" => {
                let d = p.usize(value)?;
                if d == 0 {
                    return Err(p.invalid("dimension must be at least 1"));
                }
                problem.dim = Some(d);
            }
            "problem.samples" => {
                let n = p.usize(value)?;
                if n == 0 {
                    return Err(p.invalid("need at least one sample"));
                }
                problem.samples = Some(n);
            }
            "problem.noise" => {
                let x = p.f64(value)?;
                if x < 0.0 {
                    return Err(p.invalid("noise must be nonnegative"));
                }
                problem.noise = x;
            }
            "problem.condition" => {
                let x = p.f64(value)?;
                if x < 1.0 {
                    return Err(p.invalid("condition number must be >= 1"));
                }
                problem.condition = Some(x);
            }
            "problem.spectrum" => {
                let mut entries = Vec::new();
                for piece in value.split(',') {
                    entries.push(p.f64(piece.trim())?);
                }
                if entries.is_empty() {
                    return Err(p.invalid("spectrum must be a comma-separated list"));
                }
                problem.spectrum = Some(entries);
            }
            "problem.separation" => {
                let x = p.f64(value)?;
                if x < 0.0 {
                    return Err(p.invalid("separation must be nonnegative"));
                }
                problem.separation = x;
            }
            "problem.hidden" => {
                let h = p.usize(value)?;
                if h == 0 {
                    return Err(p.invalid("hidden width must be at least 1"));
                }
                problem.hidden = h;
            }
            "optimizer" => match value {
                "neumann" | "sgd" | "momentum" | "adam" | "rmsprop" => {
                    optimizer_name = Some(value.to_string())
                }
                _ => {
                    return Err(p.invalid(format!(
                        "unknown optimizer {value:?} (neumann|sgd|momentum|adam|rmsprop)"
                    )))
                }
            },
            "neumann.alpha" => {
                let x = p.f64(value)?;
                if x < 0.0 {
                    return Err(p.invalid("alpha must be >= 0"));
                }
                neumann.alpha = x;
            }
            "neumann.beta" => {
                let x = p.f64(value)?;
                if x < 0.0 {
                    return Err(p.invalid("beta must be >= 0"));
                }
                neumann.beta_per_var = x;
            }
            "neumann.gamma" => {
                let x = p.f64(value)?;
                if !(0.0..1.0).contains(&x) {
                    return Err(p.invalid("gamma must be in [0,1)"));
                }
                neumann.gamma = x;
            }
            "neumann.mu_min" => {
                let x = p.f64(value)?;
                if !(0.0..1.0).contains(&x) {
                    return Err(p.invalid("mu_min must be in [0,1)"));
                }
                neumann.mu_min = x;
            }
            "neumann.mu_max" => {
                let x = p.f64(value)?;
                if !(0.0..1.0).contains(&x) {
                    return Err(p.invalid("mu_max must be in [0,1)"));
                }
                neumann.mu_max = x;
            }
            "neumann.burnin_epochs" => neumann.burnin_epochs = p.usize(value)?,
            "neumann.k0_epochs" => {
                let k = p.usize(value)?;
                if k == 0 {
                    return Err(p.invalid("k0_epochs must be at least 1"));
                }
                neumann.k0_epochs = k;
            }
            "neumann.k_doubling" => neumann.k_doubling = p.bool(value)?,
            "neumann.eta_mode" => match value {
                "schedule" => neumann.inverse_t_eta = false,
                "inverse_t" => neumann.inverse_t_eta = true,
                _ => return Err(p.invalid("eta_mode must be schedule|inverse_t")),
            },
            "momentum.mu" => {
                let x = p.f64(value)?;
                if !(0.0..1.0).contains(&x) {
                    return Err(p.invalid("momentum must be in [0,1)"));
                }
                baseline_over.momentum_mu = x;
            }
            "adam.beta1" => baseline_over.adam_beta1 = p.f64(value)?,
            "adam.beta2" => baseline_over.adam_beta2 = p.f64(value)?,
            "adam.epsilon" => baseline_over.adam_epsilon = p.f64(value)?,
            "rmsprop.rho" => baseline_over.rms_rho = p.f64(value)?,
            "rmsprop.epsilon" => baseline_over.rms_epsilon = p.f64(value)?,
            "lr.base" => {
                let x = p.f64(value)?;
                if !(x > 0.0) {
                    return Err(p.invalid("base learning rate must be positive"));
                }
                lr.base = x;
            }
            "lr.warmup_epochs" => lr.warmup_epochs = p.usize(value)?,
            "lr.decay_every_epochs" => lr.decay_every_epochs = p.usize(value)?,
            "lr.decay_factor" => {
                let x = p.f64(value)?;
                if !(x > 0.0 && x <= 1.0) {
                    return Err(p.invalid("decay factor must be in (0,1]"));
                }
                lr.decay_factor = x;
            }
            "batch_size" => {
                let b = p.usize(value)?;
                if b == 0 {
                    return Err(p.invalid("batch size must be at least 1"));
                }
                batch_size = b;
            }
            "epochs" => {
                let e = p.usize(value)?;
                if e == 0 {
                    return Err(p.invalid("epochs must be at least 1"));
                }
                epochs = e;
            }
            "seed" => seed = p.u64(value)?,
            "eval_fraction" => {
                let x = p.f64(value)?;
                if !(0.0..1.0).contains(&x) {
                    return Err(p.invalid("eval_fraction must be in [0,1)"));
                }
                eval_fraction = x;
            }
            "output_dir" => output_dir = Some(PathBuf::from(value)),
            "deterministic" => deterministic = p.bool(value)?,
            "checkpoint_every_epochs" => checkpoint_every = p.usize(value)?,
            _ => unreachable!("key membership checked above"),
        }
        if neumann.mu_min > neumann.mu_max {
            return Err(ConfigError::InvalidValue {
                path: origin.to_string(),
                line: line_no,
                key: key.to_string(),
                message: format!(
                    "mu_min {} must not exceed mu_max {}",
                    neumann.mu_min, neumann.mu_max
                ),
            });
        }
    }

    let family = problem.family.ok_or_else(|| ConfigError::Missing {
        path: origin.to_string(),
        key: "problem".to_string(),
    })?;
    let optimizer_name = optimizer_name.ok_or_else(|| ConfigError::Missing {
        path: origin.to_string(),
        key: "optimizer".to_string(),
    })?;

    // Data generation gets its own seed substream so runs that share a
    // seed share a dataset regardless of optimizer settings.
    let data_seed = RngStream::new(seed).substream("data", 0).seed();
    let problem_spec = match family.as_str() {
        "quadratic" => {
            let dim = problem.dim.unwrap_or(10);
            let spectrum = match problem.spectrum {
                Some(s) => s,
                None => {
                    neumann_models::problem::logspace_spectrum(dim, problem.condition.unwrap_or(10.0))
                }
            };
            ProblemSpec::Quadratic {
                spectrum,
                noise: problem.noise,
                n_samples: problem.samples.unwrap_or(1000),
                seed: data_seed,
            }
        }
        "logistic" => ProblemSpec::Logistic {
            feature_dim: problem.dim.unwrap_or(20),
            n_samples: problem.samples.unwrap_or(10_000),
            separation: problem.separation,
            seed: data_seed,
        },
        "mlp" => ProblemSpec::Mlp {
            feature_dim: problem.dim.unwrap_or(2),
            hidden_width: problem.hidden,
            n_samples: problem.samples.unwrap_or(1000),
            seed: data_seed,
        },
        _ => unreachable!("family validated at parse time"),
    };

    let optimizer = match optimizer_name.as_str() {
        "neumann" => OptimizerChoice::Neumann(neumann),
        "sgd" => OptimizerChoice::Baseline(BaselineConfig {
            kind: BaselineKind::Sgd,
            ..baseline_over
        }),
        "momentum" => OptimizerChoice::Baseline(BaselineConfig {
            kind: BaselineKind::Momentum,
            ..baseline_over
        }),
        "adam" => OptimizerChoice::Baseline(BaselineConfig {
            kind: BaselineKind::Adam,
            ..baseline_over
        }),
        "rmsprop" => OptimizerChoice::Baseline(BaselineConfig {
            kind: BaselineKind::RmsProp,
            ..baseline_over
        }),
        _ => unreachable!("optimizer validated at parse time"),
    };

    let cfg = ExperimentConfig {
        problem: problem_spec,
        optimizer,
        lr,
        batch_size,
        epochs,
        seed,
        eval_fraction,
        output_dir,
        deterministic,
        checkpoint_every_epochs: checkpoint_every,
    };

    // Cross-field checks that need the final problem size.
    let train_size = train_split_size(cfg.problem.n_samples(), cfg.eval_fraction);
    if cfg.batch_size > train_size {
        return Err(ConfigError::Invalid {
            path: origin.to_string(),
            message: format!(
                "batch_size {} exceeds the training split ({} of {} samples)",
                cfg.batch_size,
                train_size,
                cfg.problem.n_samples()
            ),
        });
    }
    Ok(cfg)
}

/// Training-split size after holding out `ceil(eval_fraction * n)`.
pub fn train_split_size(n: usize, eval_fraction: f64) -> usize {
    n - (eval_fraction * n as f64).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "problem = logistic\noptimizer = neumann\n";

    #[test]
    fn table_defaults_applied_for_unset_neumann_keys() {
        let cfg = parse_config_str(MINIMAL, "test").unwrap();
        match cfg.optimizer {
            OptimizerChoice::Neumann(n) => {
                assert_eq!(n.alpha, 1e-7);
                assert_eq!(n.beta_per_var, 1e-5);
                assert_eq!(n.gamma, 0.99);
                assert_eq!((n.mu_min, n.mu_max), (0.5, 0.9));
                assert_eq!(n.burnin_epochs, 5);
                assert_eq!(n.k0_epochs, 10);
                assert!(n.k_doubling);
            }
            other => panic!("expected neumann, got {other:?}"),
        }
    }

    #[test]
    fn gamma_out_of_range_reports_line() {
        let text = "problem = logistic\noptimizer = neumann\ngamma = 1.5\n";
        match parse_config_str(text, "t") {
            Err(ConfigError::InvalidValue { line, key, message, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(key, "neumann.gamma");
                assert!(message.contains("[0,1)"), "{message}");
            }
            other => panic!("expected invalid value, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_suggests_nearest() {
        let text = "problem = logistic\noptimizer = neumann\nneuman.alpha = 1e-7\n";
        match parse_config_str(text, "t") {
            Err(ConfigError::UnknownKey { line, key, suggestion, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(key, "neuman.alpha");
                assert!(suggestion.contains("neumann.alpha"), "{suggestion}");
            }
            other => panic!("expected unknown key, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# experiment\nproblem = quadratic # inline\n\noptimizer = sgd\n";
        let cfg = parse_config_str(text, "t").unwrap();
        assert_eq!(cfg.problem.family(), "quadratic");
        assert_eq!(cfg.optimizer.name(), "sgd");
    }

    #[test]
    fn quadratic_condition_builds_logspace_spectrum() {
        let text = "problem = quadratic\nproblem.dim = 4\nproblem.condition = 100\noptimizer = sgd\n";
        let cfg = parse_config_str(text, "t").unwrap();
        match cfg.problem {
            ProblemSpec::Quadratic { spectrum, .. } => {
                assert_eq!(spectrum.len(), 4);
                assert!((spectrum[0] - 0.01).abs() < 1e-12);
                assert!((spectrum[3] - 1.0).abs() < 1e-12);
            }
            other => panic!("expected quadratic, got {other:?}"),
        }
    }

    #[test]
    fn missing_problem_is_reported() {
        match parse_config_str("optimizer = sgd\n", "t") {
            Err(ConfigError::Missing { key, .. }) => assert_eq!(key, "problem"),
            other => panic!("expected missing key, got {other:?}"),
        }
    }

    #[test]
    fn batch_larger_than_train_split_rejected() {
        let text =
            "problem = logistic\nproblem.samples = 100\noptimizer = sgd\nbatch_size = 95\neval_fraction = 0.1\n";
        assert!(matches!(
            parse_config_str(text, "t"),
            Err(ConfigError::Invalid { .. })
        ));
    }

    #[test]
    fn same_seed_same_problem_spec() {
        let a = parse_config_str(MINIMAL, "t").unwrap();
        let b = parse_config_str("problem = logistic\noptimizer = sgd\n", "t").unwrap();
        assert_eq!(a.problem, b.problem, "problem must not depend on optimizer keys");
    }
}
