use thiserror::Error;

/// Errors raised by group arithmetic, instance construction and the harness.
#[derive(Debug, Error)]
pub enum HspError {
    /// A parameter is outside the domain of the operation (bad prime, `k >= n`, `delta >= 1/2`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An element or subgroup does not match the shape of the group it is used with.
    #[error("structural error: {0}")]
    Structural(String),

    /// An exhaustive or table-backed operation would exceed its size guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HspError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        HspError::Domain(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        HspError::Structural(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        HspError::Capacity(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        HspError::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = HspError> = std::result::Result<T, E>;
