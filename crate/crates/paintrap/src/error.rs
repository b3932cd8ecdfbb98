use std::path::PathBuf;

/// Errors of the IO layer and the command line.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The configuration is malformed or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] paintrap_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 validation, 2 physics failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Core(e) => match e.root() {
                paintrap_core::Error::InvalidParameter { .. } | paintrap_core::Error::TimeOutOfRange { .. } => 1,
                _ => 2,
            },
            Error::Io { .. } => 3,
            Error::Csv { source, .. } => match source.kind() {
                csv::ErrorKind::Io(_) => 3,
                _ => 1,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
