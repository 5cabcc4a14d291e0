use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: parse failure: {message}")]
    Parse { line: usize, message: String },

    #[error("rule {0} is not applicable to this snippet")]
    NotApplicable(String),

    #[error("rule {0} has no deterministic transformer; use an LLM backend")]
    EngineUnsupported(String),

    #[error("unknown rule id {0:?}")]
    UnknownRule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pair {index}: watermark lengths differ ({expected} vs {found})")]
    LengthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("candidate codebase is empty")]
    EmptyCodebase,

    #[error("network error talking to {endpoint}: {message}")]
    Network { endpoint: String, message: String },

    #[error("could not parse model reply: {0}")]
    ResponseParse(String),

    #[error("missing credential: environment variable {0} is not set")]
    MissingCredential(String),

    #[error("the mock backend does not support {0}")]
    MockUnsupported(&'static str),

    #[error("execution unavailable: {0}")]
    ExecutionUnavailable(String),

    #[error("embedding of {snippet} failed at bit {bit}: {reason}")]
    EmbeddingFailed {
        snippet: String,
        bit: usize,
        reason: String,
    },

    #[error("bit {bit}: {source}")]
    AtBit {
        bit: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("snippet id {0:?} not found")]
    UnknownSnippet(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_bit(bit: usize, source: Error) -> Self {
        Error::AtBit {
            bit,
            source: Box::new(source),
        }
    }
}
