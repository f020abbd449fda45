use thiserror::Error;

use crate::extension::RegularityReport;
use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("cannot compose: target `{f_target}` of the first map differs from source `{g_source}` of the second")]
    TargetMismatch { f_target: String, g_source: String },

    #[error("map {source_obj}->{target_obj} is not a bijection: {reason}")]
    NotBijective {
        source_obj: String,
        target_obj: String,
        reason: String,
    },

    #[error("invalid finite set `{id}`: {reason}")]
    InvalidSet { id: String, reason: String },

    #[error("malformed spine: {0}")]
    Structural(String),

    #[error("spine fails validation:\n{0}")]
    InvalidSpine(ValidationReport),

    #[error("spine is not regular:\n{0}")]
    NotRegular(RegularityReport),

    /// Internal consistency failure. Only an implementation bug can produce this.
    #[error("theorem violation (internal bug): {0}")]
    TheoremViolation(String),

    #[error("maps in a family must share source and target; index {index} has {found}, expected {expected}")]
    MixedSignature {
        index: usize,
        expected: String,
        found: String,
    },

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("not a group: {0}")]
    NotAGroup(String),

    #[error("not a regular group action: {0}")]
    InvalidAction(String),

    #[error("group of order {order} exceeds the classification limit of {limit}")]
    TooLarge { order: usize, limit: usize },

    #[error("set is empty")]
    EmptySet,

    #[error("tuple {0:?} does not have the ambient arity")]
    BadTuple(Vec<usize>),

    #[error("set is not a left coset of a subgroup")]
    NotACoset,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),
}
