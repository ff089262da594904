use thiserror::Error;

use crate::moebius::Model;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model mismatch: {0:?} vs {1:?}")]
    ModelMismatch(Model, Model),

    #[error("point at infinity: argument lies on the pole of the map")]
    PointAtInfinity,

    #[error("not complex-differentiable: map is anticonformal")]
    NotHolomorphic,

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("enumeration budget of {budget} entries exceeded at word length {word_len}")]
    Budget { budget: usize, word_len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty set")]
    EmptySet,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
