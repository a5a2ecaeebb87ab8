use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function it was passed to.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally malformed input (dimension mismatch, bad bounds, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A solver ran out of its configured budget.
    #[error("resource limit exceeded: {budget} budget of {limit} exhausted")]
    Resource { budget: &'static str, limit: usize },

    /// The enumeration oracle refuses instances beyond its hard size guard.
    #[error("instance too large for enumeration: {pairs} source-relay pairs (limit {limit})")]
    TooLarge { pairs: usize, limit: usize },

    #[error("failed to parse {what}: {msg}")]
    Parse { what: String, msg: String },

    /// Error raised while running a Monte Carlo trial.
    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True when this error (or the error wrapped by a trial) is a budget
    /// exhaustion.
    pub fn is_resource(&self) -> bool {
        match self {
            Error::Resource { .. } => true,
            Error::Trial { source, .. } => source.is_resource(),
            _ => false,
        }
    }
}
