use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed profile document; `location` is a line/column or a field path.
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },

    #[error("pair ({0}, {1}) has no comparisons")]
    UndefinedPair(usize, usize),

    #[error("majority relation is undefined on pair ({0}, {1})")]
    IncompleteRelation(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires a complete profile (every voter submits a strict ranking)")]
    NotCompleteProfile,

    #[error("comparison graph is disconnected; relative rewards are unidentifiable")]
    DisconnectedGraph,

    #[error("weights do not have a constant pair total")]
    NotConstantTotal,

    #[error("reward vector did not converge")]
    NotConverged,

    #[error("candidate {0} has zero probability")]
    ZeroProbability(usize),

    #[error("ranking contains ties")]
    TiesNotAllowed,

    #[error("block {0} of the partition is not BT-embeddable")]
    BlockNotEmbeddable(usize),

    #[error("search space holds {size} profiles, above the limit of {limit}")]
    SpaceTooLarge { size: u128, limit: u128 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn dims(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }
}
