use thiserror::Error;

/// Errors from dataset construction, CSV ingestion, and batch sampling.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("sample {index} has {found} features, expected {expected}")]
    InconsistentFeatureDim {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("sample {index} has non-finite features or target")]
    NonFiniteSample { index: usize },

    #[error("classification target {value} at sample {index} is not 0 or 1")]
    InvalidClassTarget { index: usize, value: f64 },

    #[error("batch size {batch} exceeds population {population}")]
    BatchTooLarge { batch: usize, population: usize },

    #[error("batch size must be at least 1")]
    EmptyBatch,

    #[error("batch index {index} out of range for dataset of {len} samples")]
    BatchIndexOutOfRange { index: usize, len: usize },

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{path}: row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        path: String,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}: row {row}, field {field}: not a number: {text:?}")]
    NonNumericField {
        path: String,
        row: usize,
        field: usize,
        text: String,
    },

    #[error("invalid problem parameters: {0}")]
    InvalidProblem(String),
}
