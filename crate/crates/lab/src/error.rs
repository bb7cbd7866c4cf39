use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },

    #[error("schema: {0}")]
    Schema(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] sublin_core::Error),
}

impl Error {
    /// Divergence is a result, not a failure of the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(sublin_core::Error::Divergence { .. }) => 2,
            _ => 1,
        }
    }
}
