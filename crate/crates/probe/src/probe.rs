//! Extremal eigenvalue estimation for mini-batch Hessians, and the
//! trajectory probe emitting eigenvalue evolution over training.

use crate::error::ProbeError;
use crate::lanczos::{lanczos, ritz_values, RitzSpectrum};
use neumann_core::{LinearOperator, RngStream, ShiftedOperator, Vector};
use neumann_models::{LossModel, MiniBatch};
use std::io::{self, Write};

/// The mini-batch Hessian of a model at fixed weights, as a matrix-free
/// operator.
pub struct HvpOperator<'a> {
    model: &'a dyn LossModel,
    w: &'a Vector,
    batch: &'a MiniBatch,
}

impl<'a> HvpOperator<'a> {
    pub fn new(model: &'a dyn LossModel, w: &'a Vector, batch: &'a MiniBatch) -> Self {
        Self { model, w, batch }
    }
}

impl LinearOperator for HvpOperator<'_> {
    fn dim(&self) -> usize {
        self.model.param_count()
    }
    fn apply(&self, v: &Vector) -> Vector {
        self.model.hvp(self.w, self.batch, v)
    }
}

/// Extremal eigenvalue estimates with the Ritz spectra that produced them.
#[derive(Debug, Clone)]
pub struct ExtremalEigs {
    pub lambda_min_est: f64,
    pub lambda_max_est: f64,
    pub unshifted: RitzSpectrum,
    pub shifted: RitzSpectrum,
}

/// Estimates the extreme eigenvalues of the mini-batch Hessian at `w`.
///
/// One unshifted Lanczos run gives the largest Ritz value; a second run on
/// `H - shift I` (shift = largest Ritz value inflated 10% toward +inf, so
/// it stays an upper bound despite Lanczos underestimating extremes)
/// recovers the most negative eigenvalue as smallest-shifted-Ritz + shift.
pub fn extremal_eigs(
    model: &dyn LossModel,
    w: &Vector,
    batch: &MiniBatch,
    k: usize,
    rng: &mut RngStream,
) -> Result<ExtremalEigs, ProbeError> {
    let op = HvpOperator::new(model, w, batch);

    let t_plain = lanczos(&op, k, rng)?;
    let plain_values = ritz_values(&t_plain)?;
    let unshifted = RitzSpectrum {
        k: t_plain.k(),
        values: plain_values,
        shift_used: None,
    };
    let lambda_max_est = unshifted.largest();

    let shift = lambda_max_est + 0.1 * lambda_max_est.abs();
    let shifted_op = ShiftedOperator::new(&op, shift);
    let t_shifted = lanczos(&shifted_op, k, rng)?;
    let shifted_values = ritz_values(&t_shifted)?;
    let shifted = RitzSpectrum {
        k: t_shifted.k(),
        values: shifted_values,
        shift_used: Some(shift),
    };
    let lambda_min_est = shifted.smallest() + shift;

    Ok(ExtremalEigs {
        lambda_min_est,
        lambda_max_est,
        unshifted,
        shifted,
    })
}

/// One row of the trajectory probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecord {
    pub step: u64,
    pub lambda_min_est: f64,
    pub lambda_max_est: f64,
    /// Seed of the substream that drew this record's batch, for replay.
    pub batch_seed: u64,
}

/// Already-loaded checkpoint weights; `source` names the originating file
/// in error messages.
#[derive(Debug, Clone)]
pub struct CheckpointWeights {
    pub source: String,
    pub step: u64,
    pub weights: Vector,
}

/// Probes each checkpoint with a fresh random mini-batch and `k` Lanczos
/// iterations. Records come back in the order given.
pub fn trajectory_probe(
    checkpoints: &[CheckpointWeights],
    model: &dyn LossModel,
    k: usize,
    batch_size: usize,
    rng: &RngStream,
) -> Result<Vec<ProbeRecord>, ProbeError> {
    let mut records = Vec::with_capacity(checkpoints.len());
    for (i, ck) in checkpoints.iter().enumerate() {
        if ck.weights.len() != model.param_count() {
            return Err(ProbeError::CheckpointDimMismatch {
                path: ck.source.clone(),
                expected: model.param_count(),
                found: ck.weights.len(),
            });
        }
        let mut batch_rng = rng.substream("probe-batch", i as u64);
        let batch_seed = batch_rng.seed();
        let batch = MiniBatch::sample(model.dataset().len(), batch_size, &mut batch_rng)?;
        let mut lanczos_rng = rng.substream("probe-lanczos", i as u64);
        let eigs = extremal_eigs(model, &ck.weights, &batch, k, &mut lanczos_rng)?;
        records.push(ProbeRecord {
            step: ck.step,
            lambda_min_est: eigs.lambda_min_est,
            lambda_max_est: eigs.lambda_max_est,
            batch_seed,
        });
    }
    Ok(records)
}

pub const PROBE_CSV_HEADER: &str = "step,lambda_min,lambda_max,batch_seed";

/// Writes the probe CSV: header plus one row per record, floats with 17
/// significant digits.
pub fn write_probe_csv<W: Write>(records: &[ProbeRecord], out: &mut W) -> io::Result<()> {
    writeln!(out, "{PROBE_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{}",
            r.step, r.lambda_min_est, r.lambda_max_est, r.batch_seed
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use neumann_models::make_quadratic_problem;

    fn quadratic_with(spectrum: &[f64]) -> neumann_models::QuadraticProblem {
        let w_star = Vector::zeros(spectrum.len());
        make_quadratic_problem(spectrum, &w_star, 0.2, 12, 4).unwrap()
    }

    #[test]
    fn mixed_spectrum_recovered_via_shift() {
        let p = quadratic_with(&[-2.0, 5.0]);
        let w = Vector::new(vec![0.3, -0.1]);
        let batch = MiniBatch::new(vec![0, 1, 2]).unwrap();
        let mut rng = RngStream::new(17);
        let eigs = extremal_eigs(&p, &w, &batch, 2, &mut rng).unwrap();
        assert_abs_diff_eq!(eigs.lambda_max_est, 5.0, epsilon = 1e-8);
        assert_abs_diff_eq!(eigs.lambda_min_est, -2.0, epsilon = 1e-8);
    }

    #[test]
    fn positive_definite_spectrum_keeps_positive_min() {
        let p = quadratic_with(&[0.5, 1.0, 3.0]);
        let w = Vector::zeros(3);
        let batch = MiniBatch::full(p.dataset());
        let mut rng = RngStream::new(9);
        let eigs = extremal_eigs(&p, &w, &batch, 3, &mut rng).unwrap();
        assert!(eigs.lambda_min_est > 0.0);
        assert_abs_diff_eq!(eigs.lambda_min_est, 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(eigs.lambda_max_est, 3.0, epsilon = 1e-8);
    }

    #[test]
    fn batch_invariance_for_quadratic_models() {
        // The quadratic Hessian is batch-independent, so estimates are too.
        let p = quadratic_with(&[-1.0, 0.3, 2.0]);
        let w = Vector::new(vec![1.0, 1.0, 1.0]);
        let b1 = MiniBatch::new(vec![0]).unwrap();
        let b2 = MiniBatch::new(vec![5, 7, 9]).unwrap();
        let e1 = extremal_eigs(&p, &w, &b1, 3, &mut RngStream::new(2)).unwrap();
        let e2 = extremal_eigs(&p, &w, &b2, 3, &mut RngStream::new(2)).unwrap();
        assert_eq!(e1.lambda_min_est, e2.lambda_min_est);
        assert_eq!(e1.lambda_max_est, e2.lambda_max_est);
    }

    #[test]
    fn trajectory_probe_empty_list_is_empty_output() {
        let p = quadratic_with(&[1.0, 2.0]);
        let rng = RngStream::new(5);
        let records = trajectory_probe(&[], &p, 2, 4, &rng).unwrap();
        assert!(records.is_empty());
        let mut buf = Vec::new();
        write_probe_csv(&records, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "step,lambda_min,lambda_max,batch_seed\n");
    }

    #[test]
    fn trajectory_probe_names_mismatched_checkpoint() {
        let p = quadratic_with(&[1.0, 2.0]);
        let rng = RngStream::new(5);
        let cks = vec![CheckpointWeights {
            source: "bad.ckpt".into(),
            step: 3,
            weights: Vector::zeros(5),
        }];
        match trajectory_probe(&cks, &p, 2, 4, &rng) {
            Err(ProbeError::CheckpointDimMismatch { path, expected, found }) => {
                assert_eq!(path, "bad.ckpt");
                assert_eq!((expected, found), (2, 5));
            }
            other => panic!("expected dim mismatch, got {other:?}"),
        }
    }

    #[test]
    fn probe_record_at_quadratic_optimum_reports_spectrum() {
        let p = quadratic_with(&[0.25, 4.0]);
        let rng = RngStream::new(11);
        let cks = vec![CheckpointWeights {
            source: "w0".into(),
            step: 0,
            weights: Vector::zeros(2),
        }];
        let records = trajectory_probe(&cks, &p, 2, 6, &rng).unwrap();
        assert_eq!(records.len(), 1);
        assert_abs_diff_eq!(records[0].lambda_min_est, 0.25, epsilon = 1e-8);
        assert_abs_diff_eq!(records[0].lambda_max_est, 4.0, epsilon = 1e-8);
        assert!(records[0].lambda_min_est <= records[0].lambda_max_est);
    }

    #[test]
    fn csv_floats_have_seventeen_significant_digits() {
        let records = vec![ProbeRecord {
            step: 7,
            lambda_min_est: -1.0 / 3.0,
            lambda_max_est: 2.0 / 3.0,
            batch_seed: 42,
        }];
        let mut buf = Vec::new();
        write_probe_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("7,-3.3333333333333331e-1,6.6666666666666663e-1,42"), "{text}");
    }
}
