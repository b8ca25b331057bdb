use thiserror::Error;

use crate::frame::{FrameViolation, ObservationViolation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid sample space: {0}")]
    InvalidSpace(String),

    #[error("unknown outcome label `{0}`")]
    UnknownLabel(String),

    #[error("operands belong to different sample spaces")]
    SpaceMismatch,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error(transparent)]
    Frame(#[from] FrameViolation),

    #[error(transparent)]
    Observation(#[from] ObservationViolation),

    #[error("{what}: {actual} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        actual: usize,
        cap: usize,
    },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("permutation is not an automorphism: image of ensemble `{ensemble}` {reason}")]
    NotAutomorphism { ensemble: String, reason: String },

    #[error("not a group: {0}")]
    NotAGroup(String),

    #[error("distribution does not extend the observed probabilities: {0}")]
    NotAnExtension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no signed extension exists")]
    Infeasible,

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid basis system: {0}")]
    InvalidBasisSystem(String),
}
