use thiserror::Error;

/// Errors raised across the evaluation and alignment modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("validation failed on `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("degenerate vector: {0}")]
    DegenerateVector(String),

    #[error("mask selects no tokens")]
    DegenerateMask,

    #[error("empty corpus: {0}")]
    EmptyCorpus(String),

    #[error("unknown subject `{0}`")]
    UnknownSubject(String),

    #[error("training diverged at step {step}: {reason}")]
    Divergence { step: usize, reason: String },

    #[error("format error{}: {reason}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Format { line: Option<usize>, reason: String },

    #[error("io error on {path}: {reason}")]
    Io { path: String, reason: String },
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn format(line: Option<usize>, reason: impl Into<String>) -> Self {
        Error::Format {
            line,
            reason: reason.into(),
        }
    }

    /// True for errors caused by numerics rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Divergence { .. } | Error::DegenerateVector(_) | Error::DegenerateMask
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
