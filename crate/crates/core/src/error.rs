use thiserror::Error;

/// Errors surfaced by the extraction, selection and learning pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown dataset id: {0}")]
    UnknownDataset(String),

    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("no parseable records in dataset")]
    EmptyDataset,

    #[error("schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },

    #[error("labels contain a single class; need both")]
    DegenerateLabels,

    #[error("unknown model id: {0}")]
    UnknownModel(String),

    #[error("stratification infeasible: {0}")]
    StratificationFailure(String),

    #[error("language detector unavailable: {0}")]
    DetectorUnavailable(String),

    #[error("no result files to report on")]
    NothingToReport,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unmapped class label: {0}")]
    UnmappedClass(String),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::IoFailure {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
