//! Side-by-side optimizer comparison on a shared problem and seed.

use crate::config::ExperimentConfig;
use crate::train::{run_train, RunSummary};
use crate::{fmt_f64, io_err, HarnessError};
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct CompareEntry {
    pub name: String,
    pub summary: RunSummary,
    /// First step whose per-step training loss reached the target.
    pub steps_to_target: Option<u64>,
}

#[derive(Debug)]
pub struct CompareOutcome {
    pub entries: Vec<CompareEntry>,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
}

/// Runs each config and writes `compare.csv` (step, one loss column per
/// optimizer) and `compare_summary.csv` under `out_dir`. All configs must
/// share the problem and seed.
pub fn run_compare(
    cfgs: &[ExperimentConfig],
    target_loss: f64,
    out_dir: &Path,
) -> Result<CompareOutcome, HarnessError> {
    if cfgs.is_empty() {
        return Err(HarnessError::Usage("compare needs at least one config".into()));
    }
    let first = &cfgs[0];
    for c in &cfgs[1..] {
        if c.problem != first.problem {
            return Err(HarnessError::Usage(
                "compare requires identical problem sections".into(),
            ));
        }
        if c.seed != first.seed {
            return Err(HarnessError::Usage("compare requires identical seeds".into()));
        }
    }

    // Unique column names: optimizer tag, suffixed on repeats.
    let mut names = Vec::with_capacity(cfgs.len());
    for c in cfgs {
        let base = c.optimizer.name().to_string();
        let dup = names.iter().filter(|n: &&String| n.starts_with(&base)).count();
        names.push(if dup == 0 { base } else { format!("{base}_{}", dup + 1) });
    }

    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut entries = Vec::with_capacity(cfgs.len());
    for (cfg, name) in cfgs.iter().zip(&names) {
        let mut cfg = cfg.clone();
        cfg.output_dir = Some(out_dir.join(name));
        let summary = run_train(&cfg)?;
        let steps_to_target = summary
            .rows
            .iter()
            .find(|r| r.train_loss <= target_loss)
            .map(|r| r.step);
        entries.push(CompareEntry {
            name: name.clone(),
            summary,
            steps_to_target,
        });
    }

    let csv_path = out_dir.join("compare.csv");
    let mut csv = String::new();
    csv.push_str("step");
    for e in &entries {
        csv.push_str(&format!(",loss_{}", e.name));
    }
    csv.push('\n');
    let max_steps = entries
        .iter()
        .map(|e| e.summary.rows.len())
        .max()
        .unwrap_or(0);
    for i in 0..max_steps {
        csv.push_str(&format!("{}", i + 1));
        for e in &entries {
            csv.push(',');
            if let Some(row) = e.summary.rows.get(i) {
                csv.push_str(&fmt_f64(row.train_loss));
            }
        }
        csv.push('\n');
    }
    std::fs::write(&csv_path, csv).map_err(|e| io_err(&csv_path, e))?;

    let summary_path = out_dir.join("compare_summary.csv");
    let mut text =
        String::from("optimizer,final_train_loss,final_eval_loss,steps_to_target,total_steps,diverged\n");
    for e in &entries {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.name,
            fmt_f64(e.summary.final_train_loss),
            e.summary.final_eval_loss.map(fmt_f64).unwrap_or_default(),
            e.steps_to_target.map(|s| s.to_string()).unwrap_or_default(),
            e.summary.total_steps,
            e.summary.diverged,
        ));
    }
    std::fs::write(&summary_path, text).map_err(|e| io_err(&summary_path, e))?;

    Ok(CompareOutcome {
        entries,
        csv_path,
        summary_path,
    })
}
