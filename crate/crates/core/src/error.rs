use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("empty file: no header or no data rows")]
    EmptyFile,

    #[error("target column `{0}` not found")]
    MissingTarget(String),

    #[error("row {row}: target cell `{value}` is not a finite real number")]
    UnparseableTarget { row: usize, value: String },

    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("row {row}, column `{column}`: missing value")]
    MissingValue { row: usize, column: String },

    #[error("row {row}, column `{column}`: `{value}` is not valid for this column")]
    InvalidCell { row: usize, column: String, value: String },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("degenerate target distribution: {0}")]
    DegenerateDistribution(String),

    #[error("invalid control points: {0}")]
    ControlPoints(String),

    #[error("nothing to resample: no rare cases at threshold {threshold}")]
    NothingToResample { threshold: f64 },

    #[error("bin of {size} row(s) has no neighbours for synthetic generation")]
    NoNeighbours { size: usize },

    #[error("invalid resampling spec: {0}")]
    InvalidSpec(String),

    #[error("{side} is undefined: no case has relevance above the threshold")]
    UndefinedMetric { side: MetricSide },

    #[error("invalid prediction batch: {0}")]
    InvalidBatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Which side of the utility-based precision/recall pair was empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricSide {
    Precision,
    Recall,
}

impl std::fmt::Display for MetricSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricSide::Precision => f.write_str("precision"),
            MetricSide::Recall => f.write_str("recall"),
        }
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
