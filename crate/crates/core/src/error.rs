use thiserror::Error;

use crate::game::GameClass;
use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("operation requires a game of class {required}, found {found}")]
    ClassMismatch { required: GameClass, found: GameClass },
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("invalid action profile: {0}")]
    InvalidProfile(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid Bayesian game: {0}")]
    InvalidBayesian(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid CNF formula: {0}")]
    InvalidCnf(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("no action profile can be induced as a pure Nash equilibrium by any commitment")]
    NoPureNeCommitment,
    #[error("approximation failed: {0}")]
    ApproximationFailure(String),
    #[error("enumeration stopped before any profile region with nonempty interior was found")]
    NoProfileProcessed,
    #[error("leader payoffs must be nonnegative for the approximation guarantee: {0}")]
    GuaranteeVoid(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
