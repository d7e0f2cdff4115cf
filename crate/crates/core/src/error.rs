use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("cannot read {path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The input could not be decoded at all (as opposed to per-session skips).
    #[error("ingest failed: {0}")]
    Ingest(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("token {token:?} occurs in {count} windows, below min_count {min_count}")]
    UndefinedSupport {
        token: String,
        count: usize,
        min_count: usize,
    },

    /// A replayed run did not reproduce its manifest.
    #[error("replay mismatch: {0}")]
    Replay(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
