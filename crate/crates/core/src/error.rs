use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{origin}: row {row}: {message}")]
    MalformedRow {
        origin: String,
        row: usize,
        message: String,
    },

    #[error("{origin}: line {line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },

    #[error("duplicate record id `{0}`")]
    DuplicateId(String),

    #[error("unknown field path `{0}`")]
    UnknownField(String),

    #[error("{origin}: duplicate word `{word}`")]
    DuplicateWord { origin: String, word: String },

    #[error("{origin}: value {value} for `{word}` outside declared range [{min}, {max}]")]
    OutOfRange {
        origin: String,
        word: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("word set `{0}` is empty")]
    EmptyWordSet(String),

    #[error("metric `{0}` is already registered")]
    DuplicateMetric(String),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("metric `{metric}` requires {kind} `{name}`, which is not loaded")]
    MissingLexicon {
        metric: String,
        kind: &'static str,
        name: String,
    },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{rows} rows is fewer than one bucket of {bucket_size}; use a smaller bucket size")]
    TooFewRows { rows: usize, bucket_size: usize },

    #[error("training outcome has a single class")]
    SingleClass,

    #[error("no features retained after dropping constant columns")]
    NoFeatures,

    #[error("outcome ids not present in the characteristics table: {}", .0.join(", "))]
    UnmatchedIds(Vec<String>),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
