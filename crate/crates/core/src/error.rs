use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the channel model, optimiser, scenario engine and CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric input lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value violates an invariant. `field` names the offending key.
    #[error("invalid configuration `{field}`: {message}")]
    Config { field: String, message: String },

    /// Two UAVs (or a UAV and the jammer) occupy the same point.
    #[error("co-located transceivers: {0} and {1}")]
    CoLocated(String, String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("cannot compare runs: {0}")]
    Compare(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
