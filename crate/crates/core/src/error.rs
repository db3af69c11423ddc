use std::path::PathBuf;

/// A configuration value that failed validation.
///
/// `key` is the dotted path of the offending entry in the scenario file
/// (for example `environment.attack_rate`).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid value for `{key}`: {constraint}")]
pub struct ConfigError {
    pub key: String,
    pub constraint: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, constraint: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            constraint: constraint.into(),
        }
    }
}

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Data {
        path: PathBuf,
        line: u64,
        message: String,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 1 for validation problems, 2 for IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
