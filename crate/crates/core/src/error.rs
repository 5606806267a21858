use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Every log weight in a row was `-inf`: the particle system is degenerate.
    #[error("all particle weights are zero ({context})")]
    AllWeightsZero { context: String },

    #[error("initial measure is improper and cannot be sampled directly")]
    ImproperM1,

    #[error("random-walk kernel started outside its domain")]
    StartOutsideDomain,

    #[error("backward sampling requires transition densities, which this model does not provide")]
    MissingTransitionDensity,

    /// Acceptance-rate driven adaptation fed with ancestor-tracing output.
    #[error("adaptation rule `{rule}` requires backward-sampling weights")]
    SelectorMismatch { rule: &'static str },

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid compartment counts: {0}")]
    InvalidCounts(String),

    #[error("target log-density is not a number ({0})")]
    NonFiniteTarget(String),

    #[error("chain of length {len} is too short (need at least {min})")]
    ChainTooShort { len: usize, min: usize },

    #[error("could not find an initial trajectory with positive density after {tries} tries")]
    InitialisationFailed { tries: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
