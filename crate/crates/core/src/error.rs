use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("ill-typed binding: {0}")]
    IllTypedBinding(String),
    #[error("transition `{0}` is not enabled under the given binding")]
    NotEnabled(String),
    #[error("record {index} (transition `{transition}`) is not enabled")]
    ReplayRejected { index: usize, transition: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rule side condition violated: {0}")]
    SideCondition(String),
    #[error("composition conflict: {0}")]
    Conflict(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("miner failed: {0}")]
    Miner(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
