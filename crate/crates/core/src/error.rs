use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("zero total mass: {0}")]
    ZeroMass(String),

    #[error("not coupleable at shift {shift}, total {total}, first-part index {index}: {detail}")]
    NotCoupleable {
        shift: usize,
        total: usize,
        index: usize,
        detail: String,
    },

    #[error("refused: {reason} (witness index {witness})")]
    Refused { witness: usize, reason: String },

    #[error("horizon exceeded: requested {requested}, horizon is {horizon}")]
    HorizonExceeded { requested: usize, horizon: usize },

    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
