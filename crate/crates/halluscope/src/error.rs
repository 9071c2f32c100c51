use std::io;
use std::path::PathBuf;

use halluscope_core::config::ConfigError;
use halluscope_core::harness::HarnessError;
use thiserror::Error;

use crate::formats::FormatError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error("passage id {id:?} appears in both {} and {}", first.display(), second.display())]
    DuplicatePassage {
        id: String,
        first: PathBuf,
        second: PathBuf,
    },
    #[error("passages without annotations: {}", .0.join(", "))]
    Unannotated(Vec<String>),
    #[error("annotated passages without traces: {}", .0.join(", "))]
    MissingTraces(Vec<String>),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Process exit code: 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
