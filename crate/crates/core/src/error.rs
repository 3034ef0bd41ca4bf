use thiserror::Error;

/// Errors raised by field construction, extractor evaluation and audits.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A precondition on the parameters was violated.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// An operation was applied outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested enumeration exceeds a desk-scale cap.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
    /// An invariant that should be unreachable was broken.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Prefixes the message with `what`, keeping the variant.
    pub fn context(self, what: &str) -> Self {
        match self {
            Error::Parameter(m) => Error::Parameter(format!("{what}: {m}")),
            Error::Domain(m) => Error::Domain(format!("{what}: {m}")),
            Error::Capacity(m) => Error::Capacity(format!("{what}: {m}")),
            Error::Parse(m) => Error::Parse(format!("{what}: {m}")),
            Error::Internal(m) => Error::Internal(format!("{what}: {m}")),
        }
    }

    /// Process exit code: 2 for usage, parse and precondition failures,
    /// 3 for capacity, 1 for internal errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Domain(_) | Error::Parse(_) => 2,
            Error::Capacity(_) => 3,
            Error::Internal(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! param_err {
    ($($arg:tt)*) => { $crate::error::Error::Parameter(format!($($arg)*)) };
}
macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
macro_rules! capacity_err {
    ($($arg:tt)*) => { $crate::error::Error::Capacity(format!($($arg)*)) };
}

pub(crate) use capacity_err;
pub(crate) use domain_err;
pub(crate) use param_err;
