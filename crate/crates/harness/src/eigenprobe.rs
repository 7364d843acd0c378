//! CLI-level eigenvalue trajectory probe: read checkpoints matching a
//! glob, probe each against the configured problem, write the probe CSV.

use crate::checkpoint::read_checkpoint;
use crate::config::ExperimentConfig;
use crate::glob::expand_glob;
use crate::{io_err, HarnessError};
use neumann_core::RngStream;
use neumann_probe::{trajectory_probe, write_probe_csv, CheckpointWeights, PROBE_CSV_HEADER};
use std::path::PathBuf;

/// Returns the CSV path and the number of records written. An empty glob
/// match produces a header-only CSV, a warning on stderr, and success.
pub fn run_eigenprobe(
    cfg: &ExperimentConfig,
    checkpoint_glob: &str,
    k: usize,
    batch_size: Option<usize>,
) -> Result<(PathBuf, usize), HarnessError> {
    let model = cfg.problem.build()?;
    let paths = expand_glob(checkpoint_glob)?;

    let mut checkpoints = Vec::with_capacity(paths.len());
    for p in &paths {
        let ck = read_checkpoint(p)?;
        checkpoints.push(CheckpointWeights {
            source: p.display().to_string(),
            step: ck.step,
            weights: ck.weights,
        });
    }
    checkpoints.sort_by_key(|c| c.step);
    if checkpoints.is_empty() {
        eprintln!("warning: no checkpoints match {checkpoint_glob:?}");
    }

    let batch = batch_size
        .unwrap_or(cfg.batch_size)
        .min(model.dataset().len());
    let rng = RngStream::new(cfg.seed).substream("eigenprobe", 0);
    let records = trajectory_probe(&checkpoints, model.as_ref(), k, batch, &rng)?;

    let out_dir = cfg.resolved_output_dir();
    std::fs::create_dir_all(&out_dir).map_err(|e| io_err(&out_dir, e))?;
    let csv_path = out_dir.join("probe.csv");
    let tmp = out_dir.join("probe.csv.tmp");
    let mut buf = Vec::new();
    write_probe_csv(&records, &mut buf).map_err(|e| io_err(&tmp, e))?;
    debug_assert!(buf.starts_with(PROBE_CSV_HEADER.as_bytes()));
    std::fs::write(&tmp, &buf).map_err(|e| io_err(&tmp, e))?;
    std::fs::rename(&tmp, &csv_path).map_err(|e| io_err(&csv_path, e))?;
    Ok((csv_path, records.len()))
}
