use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed markup at byte {offset}: {message}")]
    Markup { offset: usize, message: String },

    #[error("invalid formula tree at {path}: {message}")]
    InvalidTree { path: String, message: String },

    #[error("cannot decode MTerm at byte {offset}: {message}")]
    MTermSyntax { offset: usize, message: String },

    #[error("invalid MSC code `{0}`")]
    InvalidMsc(String),

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("recall is undefined: the reference matrix has no relevant cells")]
    NoRelevantCells,

    #[error("unknown configuration key `{key}` in section [{section}]")]
    UnknownConfigKey { section: String, key: String },

    #[error("invalid value `{value}` for configuration key `{key}`")]
    InvalidConfigValue { key: String, value: String },

    #[error("duplicate config id `{0}`")]
    DuplicateConfigId(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Png(#[from] png::EncodingError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
