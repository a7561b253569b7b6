use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point, strip or rectangle falls outside the region where an
    /// operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A `-inf` sample appeared where a finite function was required.
    #[error("unbounded function: {0}")]
    Unbounded(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A corpus item does not satisfy an experiment's precondition.
    #[error("rejected: {0}")]
    Rejected(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
