use thiserror::Error;

/// Errors produced by the simulator and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("chain is not ergodic: {0}")]
    NonErgodic(String),

    #[error("oracle predictor requires the true next state")]
    MissingOracleInput,

    #[error("disruption window is not terminated")]
    UnterminatedWindow,

    #[error("degenerate recovery: {0}")]
    DegenerateRecovery(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no route from {source_id} to {destination} avoiding the region")]
    NoRoute { source_id: u32, destination: u32 },

    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
