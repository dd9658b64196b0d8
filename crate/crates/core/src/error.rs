use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Text that does not parse as a monomial or polynomial.
    #[error("parse error: {0}")]
    Parse(String),

    /// The operation would materialize something too large.
    #[error("{what} = {value} exceeds the cap of {cap}; {hint}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
        hint: &'static str,
    },

    /// An internal identity failed. This signals a bug or a counterexample,
    /// never bad input.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("json: {0}")]
    Json(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
