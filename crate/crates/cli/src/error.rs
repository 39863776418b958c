use std::path::PathBuf;

use splitbuf_core::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } | CliError::Csv { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

fn is_numerical(err: &ModelError) -> bool {
    match err {
        ModelError::Numerical { .. } | ModelError::UndefinedDelay(_) => true,
        ModelError::AtThreshold { source, .. } => is_numerical(source),
        _ => false,
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        if is_numerical(&err) {
            CliError::Numerical(err.to_string())
        } else {
            CliError::Config(err.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
