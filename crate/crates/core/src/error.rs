use std::path::PathBuf;

/// Errors produced by the ranking pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("line {line}: rating {rating} outside [{min}, {max}]")]
    RatingOutOfRange { line: u64, rating: i64, min: u32, max: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("user {0:?} has no ratings")]
    NoRatings(String),

    #[error("attack cannot be generated: {0}")]
    Attack(String),

    #[error("compressor failure: {0}")]
    Compressor(#[source] std::io::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
