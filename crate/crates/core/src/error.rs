//! Error types shared across the pipeline.

use std::path::PathBuf;

use thiserror::Error;

/// Any failure the analysis pipeline can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON at byte {offset} (line {line}, column {column}): {message}")]
    Parse {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("record {index}: {reason}")]
    Record { index: usize, reason: RecordError },

    #[error("readability undefined: {words} word(s), {sentences} sentence(s)")]
    UndefinedInput { words: usize, sentences: usize },

    #[error("empty vocabulary: no terms survived preprocessing")]
    EmptyVocabulary,

    #[error("cannot fit {k} topics on {docs} document(s)")]
    TooFewDocuments { docs: usize, k: usize },

    #[error("state {0} has no documents in the fitted model")]
    StateNotInModel(String),

    #[error("missing component score: {0}")]
    MissingComponent(&'static str),

    #[error("prompt relevance is not available; supply a predictions file to compute the developer index")]
    MissingPredictions,

    #[error("need at least two states, got {0}")]
    TooFewStates(usize),

    #[error("embedding provider failed for question {index}: {reason}")]
    Provider { index: usize, reason: String },

    #[error("invalid {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },
}

/// Validation failure for a single input record, reported with its index.
#[derive(Debug, Error)]
pub enum RecordError {
    #[error("missing required field \"{0}\"")]
    MissingField(&'static str),
    #[error("field \"{field}\" must be {expected}")]
    WrongType {
        field: &'static str,
        expected: &'static str,
    },
    #[error("unknown state \"{0}\"")]
    UnknownState(String),
    #[error("unknown contributor \"{0}\" (expected \"official\" or \"non_profit\")")]
    UnknownContributor(String),
    #[error("timestamp \"{0}\" does not match YYYY-MM-DD HH:MM:SS")]
    BadTimestamp(String),
    #[error("field \"{0}\" is empty after cleaning")]
    EmptyAfterCleaning(&'static str),
    #[error("state \"{found}\" conflicts with map key \"{expected}\"")]
    StateMismatch { found: String, expected: String },
}

pub type Result<T> = std::result::Result<T, Error>;
