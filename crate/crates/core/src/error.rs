use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },

    #[error("{0}: corpus is empty")]
    EmptyCorpus(String),

    #[error("invalid split: train {train} + test {test} does not match corpus size {len}")]
    SplitCounts { train: usize, test: usize, len: usize },

    #[error(
        "dataset {name}: expected {expected_pos} positive / {expected_neg} negative documents, found {pos} / {neg}"
    )]
    DatasetCounts {
        name: String,
        expected_pos: usize,
        expected_neg: usize,
        pos: usize,
        neg: usize,
    },

    #[error("unknown dataset {name:?}; known datasets: {known}")]
    UnknownDataset { name: String, known: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{method} supports exactly 2 classes, got {classes}")]
    UnsupportedClasses { method: &'static str, classes: usize },

    #[error("feature index {index} out of range for {len} features")]
    FeatureIndex { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("training labels contain a single class")]
    SingleClass,

    #[error("RBF kernel is capped at {cap} training rows, got {rows}; use the linear kernel instead")]
    KernelCap { cap: usize, rows: usize },

    #[error("metric undefined on an empty evaluation set")]
    UndefinedMetric,

    #[error("malformed model dump: {0}")]
    ModelFormat(String),

    #[error("config: {0}")]
    Config(String),

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
