use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the documented domain.
    #[error("invalid input: {0}")]
    Validation(String),

    /// The parameters describe a model that cannot be realized (for example an
    /// edge probability above one).
    #[error("model invalid: {0}")]
    ModelInvalid(String),

    /// The request is well formed but exceeds a hard size limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("decode error at byte {position}: {reason}")]
    Decode { position: usize, reason: String },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::ModelInvalid(msg.into())
    }

    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }

    pub(crate) fn decode(position: usize, reason: impl Into<String>) -> Self {
        Error::Decode {
            position,
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_)
            | Error::ModelInvalid(_)
            | Error::Decode { .. }
            | Error::Parse { .. } => 2,
            Error::Io(_) | Error::Csv(_) => 3,
            Error::Capacity(_) => 4,
        }
    }
}
