use thiserror::Error;

/// Failure classes shared by every operation in the crate.
///
/// The CLI maps these onto exit codes: usage-type errors (`Dimension`,
/// `Parse`, `Usage`) exit 2, `Domain` and `Precondition` exit 1, and `Inconsistency`
/// (an asserted structural claim that failed at runtime) exits 3.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistency(msg.into())
    }
}

impl Error {
    /// Process exit status for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Dimension(_) | Error::Parse(_) | Error::Usage(_) => 2,
            Error::Domain(_) | Error::Precondition(_) => 1,
            Error::Inconsistency(_) => 3,
        }
    }
}
