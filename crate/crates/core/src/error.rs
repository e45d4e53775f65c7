use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("precision target unreachable: {0}")]
    Precision(String),

    /// A direction-set construction or validation failure. `rule` names the
    /// violated constraint.
    #[error("construction failed [{rule}]: {detail}")]
    Construction { rule: &'static str, detail: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn construction(rule: &'static str, detail: impl Into<String>) -> Error {
    Error::Construction {
        rule,
        detail: detail.into(),
    }
}
