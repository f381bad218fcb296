use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (shapes, non-finite values, bad ranges).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A graph that carries too little structure for the requested metric.
    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    /// Positional embedding with zero spread.
    #[error("degenerate embedding: {0}")]
    DegenerateEmbedding(String),

    /// Brain network with fewer than two member ROIs.
    #[error("degenerate network {network}: {reason}")]
    DegenerateNetwork { network: String, reason: String },

    #[error("assignment error: {0}")]
    Assignment(String),

    /// Cosine similarity against a zero vector.
    #[error("undefined similarity: {0}")]
    UndefinedSimilarity(String),

    /// Numeric fitting failure (rank-0 data, empty corpus, infeasible k).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate_graph(msg: impl Into<String>) -> Self {
        Error::DegenerateGraph(msg.into())
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the failure stems from the caller's inputs rather than from
    /// a numeric breakdown inside the pipeline.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::DegenerateNetwork { .. }
                | Error::Assignment(_)
                | Error::Format { .. }
                | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
