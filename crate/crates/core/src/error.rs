use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Penalty or solver parameters are invalid.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A caller-side precondition did not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fixed-point iteration did not converge after {iterations} steps (last iterate {last_iterate})")]
    NonConvergence { last_iterate: f64, iterations: usize },

    #[error("singular value decomposition failed to converge")]
    Svd,

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    /// An internal invariant was breached; this signals a bug.
    #[error("invariant breached: {0}")]
    Invariant(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("parse error near `{token}`: {message}")]
    Parse { token: String, message: String },

    /// Malformed input data, with a 1-based line number when known.
    #[error("data error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Data { line: Option<usize>, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn data(line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Data {
            line,
            message: msg.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::Svd | Error::Invariant(_) | Error::NonFinite(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
