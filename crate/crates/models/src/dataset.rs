//! Samples, datasets, mini-batches, and CSV ingestion.

use crate::error::ModelError;
use neumann_core::RngStream;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

/// One training example: a feature vector and a real target (class labels
/// encoded 0/1 for classification problems).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub target: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Classification,
    Regression,
}

/// Immutable ordered collection of samples sharing one feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    feature_dim: usize,
    kind: DatasetKind,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, kind: DatasetKind) -> Result<Self, ModelError> {
        let feature_dim = samples.first().ok_or(ModelError::EmptyDataset)?.features.len();
        for (index, s) in samples.iter().enumerate() {
            if s.features.len() != feature_dim {
                return Err(ModelError::InconsistentFeatureDim {
                    index,
                    expected: feature_dim,
                    found: s.features.len(),
                });
            }
            if !s.target.is_finite() || s.features.iter().any(|x| !x.is_finite()) {
                return Err(ModelError::NonFiniteSample { index });
            }
            if kind == DatasetKind::Classification && s.target != 0.0 && s.target != 1.0 {
                return Err(ModelError::InvalidClassTarget {
                    index,
                    value: s.target,
                });
            }
        }
        Ok(Self {
            samples,
            feature_dim,
            kind,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn kind(&self) -> DatasetKind {
        self.kind
    }

    pub fn sample(&self, i: usize) -> &Sample {
        &self.samples[i]
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }
}

/// Indices of one mini-batch into a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct MiniBatch {
    indices: Vec<usize>,
}

impl MiniBatch {
    pub fn new(indices: Vec<usize>) -> Result<Self, ModelError> {
        if indices.is_empty() {
            return Err(ModelError::EmptyBatch);
        }
        Ok(Self { indices })
    }

    /// The full dataset as one batch, in index order.
    pub fn full(dataset: &Dataset) -> Self {
        Self {
            indices: (0..dataset.len()).collect(),
        }
    }

    /// `size` indices drawn uniformly without replacement from `0..n`.
    /// One-shot draw used by the eigenvalue probe; training uses
    /// [`crate::sampler::EpochSampler`].
    pub fn sample(n: usize, size: usize, rng: &mut RngStream) -> Result<Self, ModelError> {
        if size == 0 {
            return Err(ModelError::EmptyBatch);
        }
        if size > n {
            return Err(ModelError::BatchTooLarge {
                batch: size,
                population: n,
            });
        }
        Ok(Self {
            indices: rng.choose_distinct(n, size),
        })
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn validate_for(&self, dataset: &Dataset) -> Result<(), ModelError> {
        for &i in &self.indices {
            if i >= dataset.len() {
                return Err(ModelError::BatchIndexOutOfRange {
                    index: i,
                    len: dataset.len(),
                });
            }
        }
        Ok(())
    }
}

/// Loads a dataset from a CSV file: one header line, then rows of
/// `f1,...,fd,target`. Kind is inferred: classification when every target
/// is 0 or 1, regression otherwise.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset, ModelError> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let file = File::open(path).map_err(|source| ModelError::Io {
        path: path_str.clone(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut samples = Vec::new();
    let mut expected_fields: Option<usize> = None;
    for (line_no, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| ModelError::Io {
            path: path_str.clone(),
            source,
        })?;
        let row = line_no + 1;
        if row == 1 {
            continue; // header
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            return Err(ModelError::RaggedRow {
                path: path_str,
                row,
                expected: expected_fields.unwrap_or(2),
                found: fields.len(),
            });
        }
        match expected_fields {
            None => expected_fields = Some(fields.len()),
            Some(n) if fields.len() != n => {
                return Err(ModelError::RaggedRow {
                    path: path_str,
                    row,
                    expected: n,
                    found: fields.len(),
                });
            }
            _ => {}
        }
        let mut values = Vec::with_capacity(fields.len());
        for (field, text) in fields.iter().enumerate() {
            let v: f64 = text.trim().parse().map_err(|_| ModelError::NonNumericField {
                path: path_str.clone(),
                row,
                field: field + 1,
                text: text.trim().to_string(),
            })?;
            values.push(v);
        }
        let target = values.pop().expect("at least two fields");
        samples.push(Sample {
            features: values,
            target,
        });
    }

    if samples.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let classification = samples.iter().all(|s| s.target == 0.0 || s.target == 1.0);
    let kind = if classification {
        DatasetKind::Classification
    } else {
        DatasetKind::Regression
    };
    Dataset::new(samples, kind)
}
