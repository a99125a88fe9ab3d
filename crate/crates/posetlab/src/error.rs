use thiserror::Error;

/// Errors shared across the library. Size-guard refusals are kept separate
/// from validation errors so callers can distinguish "too big for the exact
/// path" from "bad input".
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("relation closure creates a cycle through element {0}")]
    Cycle(usize),
    #[error("element index {index} out of range for poset of size {size}")]
    Index { index: usize, size: usize },
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("poset is not a monotone tree")]
    NotMonotoneTree,
    #[error("poset is not connected")]
    DisconnectedPoset,
    #[error("refused by size guard: {what} = {requested} exceeds {limit}")]
    TooLarge {
        what: &'static str,
        requested: u64,
        limit: u64,
    },
    #[error("operation requires a non-empty family")]
    EmptyFamily,
    #[error("family is not induced vee-free: set {bottom} has incomparable strict supersets {antichain:?}")]
    NotVeeFree { bottom: u32, antichain: Vec<u32> },
    #[error("ground set size {n} exceeds container limit {max}")]
    GroundTooLarge { n: u32, max: u32 },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("layered witness condition {condition} fails at set {witness}")]
    ConditionFailed { condition: u8, witness: u32 },
    #[error("directed tree is invalid: {0}")]
    BadTree(String),
}

pub type Result<T> = std::result::Result<T, Error>;
