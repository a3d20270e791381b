use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the engine.
///
/// `Consistency` is reserved for internal cross-checks that should never fire;
/// every other variant is a caller-side precondition problem.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph format error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("no cycle-factor")]
    NoCycleFactor,

    #[error("graph is not {d}-regular")]
    NotRegular { d: usize },

    #[error("degree {d} does not divide vertex count {n}")]
    NotDivisible { n: usize, d: usize },

    #[error("malformed arc constraints: {0}")]
    MalformedConstraints(String),

    #[error("graph has {n} vertices, above the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("random generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for internal cross-check failures, as opposed to bad input.
    pub fn is_consistency_failure(&self) -> bool {
        matches!(self, Error::Consistency(_))
    }
}
