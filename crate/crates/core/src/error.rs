use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlignmentError {
    #[error("{side} word {word} span {start}..{end} is inconsistent with an aligned text of {text_len} chars")]
    InconsistentWords {
        side: &'static str,
        word: usize,
        start: usize,
        end: usize,
        text_len: usize,
    },
    #[error("hypothesis word {word} would land in a non-contiguous segment")]
    NonContiguous { word: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("error rate is undefined for an empty reference")]
    EmptyReference,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbeddingError {
    #[error("cannot embed empty text")]
    EmptyText,
    #[error("embedding has no tokens")]
    NoTokens,
    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,
    #[error("vector dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("embedding service at {url} failed after {attempts} attempt(s): {message}")]
    Transport {
        url: String,
        attempts: u32,
        retryable: bool,
        status: Option<u16>,
        message: String,
    },
    #[error("embedding service returned an invalid response: {0}")]
    Protocol(String),
    #[error("invalid embedder configuration: {0}")]
    Config(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least 2 points, got {0}")]
    TooShort(usize),
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error("corpus is empty")]
    Empty,
    #[error("benchmark needs at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },
    #[error("record {id:?}: {source}")]
    Record {
        id: String,
        #[source]
        source: Box<Error>,
    },
    #[error("cannot start worker pool: {0}")]
    Workers(String),
}

/// Any failure surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Alignment(#[from] AlignmentError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

impl Error {
    /// True when the root cause is the embedding backend (transport,
    /// protocol, or configuration), as opposed to bad input data.
    pub fn is_backend(&self) -> bool {
        match self {
            Error::Embedding(e) => matches!(
                e,
                EmbeddingError::Transport { .. }
                    | EmbeddingError::Protocol(_)
                    | EmbeddingError::Config(_)
            ),
            Error::Corpus(CorpusError::Record { source, .. }) => source.is_backend(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
