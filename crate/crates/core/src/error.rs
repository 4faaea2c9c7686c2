use std::path::PathBuf;

/// Errors produced while building, reading or validating binary matrices.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Shapes disagree: ragged rows, mismatched vector lengths, empty input.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A value outside its permitted domain (non-binary cell, probability outside [0, 1]).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{}: format error: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("{}: expected {expected} payload bytes, found {found}", path.display())]
    Length {
        path: PathBuf,
        expected: u64,
        found: u64,
    },

    #[error("{}: validation error: {message}", path.display())]
    Validation { path: PathBuf, message: String },

    /// A derived count fell outside `[0, n]`; the inputs were not a consistent Gram set.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
