use std::io;
use std::path::PathBuf;

use thiserror::Error;
use xeos_core::etl::Anomaly;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("block ranges: {0}")]
    Range(String),
    #[error("strict mode: {0}")]
    Strict(Anomaly),
    #[error("{count} schema violation(s)")]
    Schema { count: usize },
    #[error("configuration: {0}")]
    Config(String),
    #[error("nothing to process: {0}")]
    Empty(String),
    #[error("collector is closed")]
    CollectorClosed,
    #[error("record for block {got} submitted after block {last}")]
    OutOfOrder { last: u64, got: u64 },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Range(_) | Error::Config(_) | Error::Empty(_) => 2,
            Error::Strict(_) | Error::Schema { .. } => 3,
            Error::Io { .. } | Error::CollectorClosed | Error::OutOfOrder { .. } => 4,
        }
    }
}
