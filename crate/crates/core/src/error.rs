//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation's contract (index out of range,
    /// length mismatch, non-finite value, simplex violation, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An input was structurally valid but numerically unusable
    /// (all-zero score vector, zero-norm vector, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// An emotion word could not be resolved in an embedding table.
    #[error("no embedding for {word:?} (tried {tried:?})")]
    MissingEmbedding { word: String, tried: Vec<String> },

    /// A file could not be parsed (embedding tables, malformed JSON lines).
    #[error("{path}:{line}: parse error: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// A file parsed but its content violates the expected schema
    /// (unknown emotion, empty text, duplicate sample id, ...).
    #[error("{path}:{line}: schema error: {message}")]
    Schema {
        path: String,
        line: usize,
        message: String,
    },

    /// The run configuration is unusable (missing required inputs,
    /// out-of-range hyperparameters, unknown method names, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A metric has no defined value (for example zero total support).
    #[error("undefined result: {0}")]
    Undefined(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 for configuration problems,
    /// 3 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
