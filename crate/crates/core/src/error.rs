use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A coordinate or grid index outside its half-open domain.
    #[error("{what} out of range: {value}")]
    Range { what: &'static str, value: String },

    #[error("configuration error: {0}")]
    Config(String),

    /// The index pipeline produced something that has no word triple.
    #[error("codec error: {0}")]
    Codec(String),

    #[error("address not found: unknown word `{word}`")]
    UnknownWord { word: String },

    #[error("address not found: {0}")]
    AddressNotFound(String),

    #[error("{path}:{line}: {message}")]
    Ingestion { path: PathBuf, line: usize, message: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn range(what: &'static str, value: impl ToString) -> Self {
        Error::Range { what, value: value.to_string() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
