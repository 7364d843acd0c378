//! Shuffled-epoch mini-batch sampling.
//!
//! A permutation of the index pool is consumed in consecutive chunks of
//! size `B` and reshuffled each epoch. When `B` does not divide the pool
//! size, the short final chunk is dropped so every emitted batch has
//! exactly `B` samples.

use crate::dataset::MiniBatch;
use crate::error::ModelError;
use neumann_core::RngStream;

#[derive(Debug, Clone)]
pub struct EpochSampler {
    pool: Vec<usize>,
    batch_size: usize,
    cursor: usize,
    epoch: u64,
    rng: RngStream,
}

impl EpochSampler {
    /// Samples batches from the given index pool (typically the training
    /// split of a dataset).
    pub fn new(pool: Vec<usize>, batch_size: usize, rng: RngStream) -> Result<Self, ModelError> {
        if batch_size == 0 {
            return Err(ModelError::EmptyBatch);
        }
        if batch_size > pool.len() {
            return Err(ModelError::BatchTooLarge {
                batch: batch_size,
                population: pool.len(),
            });
        }
        let mut s = Self {
            pool,
            batch_size,
            cursor: 0,
            epoch: 0,
            rng,
        };
        s.reshuffle();
        Ok(s)
    }

    pub fn over_range(n: usize, batch_size: usize, rng: RngStream) -> Result<Self, ModelError> {
        Self::new((0..n).collect(), batch_size, rng)
    }

    /// Full batches per epoch: `floor(pool / B)`.
    pub fn steps_per_epoch(&self) -> usize {
        self.pool.len() / self.batch_size
    }

    /// Completed epochs so far.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    fn reshuffle(&mut self) {
        self.rng.shuffle(&mut self.pool);
        self.cursor = 0;
    }

    /// The next mini-batch under shuffled-epoch semantics.
    pub fn next_batch(&mut self) -> MiniBatch {
        if self.cursor + self.batch_size > self.pool.len() {
            self.epoch += 1;
            self.reshuffle();
        }
        let chunk = self.pool[self.cursor..self.cursor + self.batch_size].to_vec();
        self.cursor += self.batch_size;
        MiniBatch::new(chunk).expect("batch_size >= 1")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_batch_covers_every_index_once() {
        let mut s = EpochSampler::over_range(7, 7, RngStream::new(1)).unwrap();
        let b = s.next_batch();
        let mut idx = b.indices().to_vec();
        idx.sort_unstable();
        assert_eq!(idx, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn singleton_batches_deterministic() {
        let mut a = EpochSampler::over_range(5, 1, RngStream::new(44)).unwrap();
        let mut b = EpochSampler::over_range(5, 1, RngStream::new(44)).unwrap();
        for _ in 0..20 {
            assert_eq!(a.next_batch(), b.next_batch());
        }
    }

    #[test]
    fn epoch_coverage_exact_when_batch_divides() {
        let mut s = EpochSampler::over_range(12, 3, RngStream::new(9)).unwrap();
        let mut seen = Vec::new();
        for _ in 0..s.steps_per_epoch() {
            seen.extend_from_slice(s.next_batch().indices());
        }
        seen.sort_unstable();
        assert_eq!(seen, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn remainder_dropped_and_reshuffled() {
        // N=10, B=3: an epoch is 3 batches; the 10th index is skipped.
        let mut s = EpochSampler::over_range(10, 3, RngStream::new(5)).unwrap();
        assert_eq!(s.steps_per_epoch(), 3);
        for _ in 0..3 {
            let b = s.next_batch();
            assert_eq!(b.size(), 3);
        }
        assert_eq!(s.epoch(), 0);
        let b = s.next_batch(); // the reshuffle happened here
        assert_eq!(b.size(), 3);
        assert_eq!(s.epoch(), 1);
    }

    #[test]
    fn oversized_batch_rejected() {
        assert!(matches!(
            EpochSampler::over_range(4, 5, RngStream::new(0)),
            Err(ModelError::BatchTooLarge { .. })
        ));
    }
}
