use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}:{line}: duplicate code `{code}`", path.display())]
    DuplicateCode {
        path: PathBuf,
        line: usize,
        code: String,
    },

    #[error("{}:{line}: empty {field}", path.display())]
    EmptyField {
        path: PathBuf,
        line: usize,
        field: &'static str,
    },

    #[error("{}:{line}: field `{value}` contains stray characters of the delimiter `{delimiter}`", path.display())]
    UndeclaredDelimiter {
        path: PathBuf,
        line: usize,
        value: String,
        delimiter: String,
    },

    #[error("region tree contains a cycle through `{0}`")]
    RegionCycle(String),

    #[error("{}:{line}: region `{child}` has two parents (`{first}`, `{second}`)", path.display())]
    MultipleParents {
        path: PathBuf,
        line: usize,
        child: String,
        first: String,
        second: String,
    },

    #[error("term is empty after normalization")]
    EmptyTerm,

    #[error("span {start}..{end} is out of bounds for a term of length {len}")]
    InvalidSpan { start: usize, end: usize, len: usize },

    #[error("vector dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cosine of a zero vector")]
    ZeroVector,

    #[error("no embedding available for `{0}`")]
    EmbeddingUnavailable(String),

    #[error("length mismatch: {left} gold sets vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty gold set for query {0}")]
    EmptyGold(usize),

    #[error("synonym index is empty")]
    EmptyIndex,

    #[error("fraction {0} yields no training pairs")]
    EmptySample(f64),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by configuration rather than input data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
