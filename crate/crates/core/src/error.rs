use thiserror::Error;

use crate::ground::ElementId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element {element} is outside the ground set of size {ground_size}")]
    OutOfGround { element: ElementId, ground_size: usize },

    #[error("element {0} is already in the set")]
    AlreadyPresent(ElementId),

    #[error("stream is not a permutation of the ground set: {0}")]
    NotAPermutation(String),

    #[error("stream cursor already consumed")]
    StreamConsumed,

    #[error("ground sets differ: {0} vs {1}")]
    GroundMismatch(usize, usize),

    #[error("empty matroid list")]
    NoMatroids,

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid fraction {0:?}: expected an exact `a/b` or integer literal")]
    InvalidFraction(String),

    #[error("epsilon {0} outside the admissible range (0, 1/7)")]
    EpsilonOutOfRange(String),

    #[error("objective is not flagged monotone")]
    NotMonotone,

    #[error("ground size {0} too large for exhaustive search (limit {1})")]
    TooLarge(usize, usize),

    #[error("search budget of {0} nodes exhausted")]
    SearchBudgetExhausted(u64),

    #[error("branch budget exceeded: {live} live branches > cap {cap}")]
    BranchBudgetExceeded { live: usize, cap: usize },

    #[error("graph is not bipartite: {0}")]
    NotBipartite(String),

    #[error("promise violated: {0}")]
    PromiseViolated(String),

    #[error("premise not satisfied: {0}")]
    PremiseViolated(String),

    #[error("precomputation budget exceeded: {0} nodes > {1}")]
    PrecomputationBudget(u128, u128),

    #[error("malformed message: {0}")]
    MalformedMessage(String),

    #[error("instance format: {0}")]
    Format(String),
}
