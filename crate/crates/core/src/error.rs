use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no certified generator set after {attempts} attempts")]
    CertificationExhausted { attempts: u32 },

    #[error("{what} needs {needed}, budget is {budget}")]
    ResourceLimit {
        what: String,
        needed: u128,
        budget: u128,
    },

    #[error("edge {edge:x?} produced {count} times, expected {expected}")]
    MultiplicityViolation {
        edge: Vec<u64>,
        count: u64,
        expected: u64,
    },

    #[error("vertex {vertex} has degree {degree}, expected {expected}")]
    NonRegular {
        vertex: usize,
        degree: u64,
        expected: u64,
    },

    #[error("power iteration did not converge after {iterations} iterations (best estimate {estimate})")]
    NoConvergence { estimate: f64, iterations: usize },

    #[error("no intermediate tuple: {available} free generators, {needed} needed")]
    NoDisjointIntermediate { available: usize, needed: usize },

    #[error("{0:x} is not a sum of two distinct generators")]
    NoDecomposition(u64),

    #[error("degree mismatch at {witness}: found {found}, expected {expected}")]
    DegreeMismatch {
        witness: String,
        found: u128,
        expected: u128,
    },

    #[error("isomorphism check failed: {0}")]
    IsomorphismFailure(String),

    #[error("bound violated: {0}")]
    BoundViolated(String),

    #[error("invalid walk step {step}: {reason}")]
    InvalidWalk { step: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
