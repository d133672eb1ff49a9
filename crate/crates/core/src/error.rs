use thiserror::Error;

use crate::model::Time;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("job index {0} is not part of the instance")]
    UnknownJob(usize),

    #[error("job `{0}` appears more than once")]
    DuplicateJob(String),

    #[error("duplicate job id `{0}`")]
    DuplicateId(String),

    #[error("job `{id}`: {reason}")]
    InvalidJob { id: String, reason: String },

    #[error("job `{id}`: compression {x} outside [0, {max}]")]
    CompressionOutOfRange { id: String, x: Time, max: Time },

    #[error("compression vector has {got} entries, instance has {expected} jobs")]
    CompressionLength { expected: usize, got: usize },

    #[error("budget must be non-negative, got {0}")]
    NegativeBudget(i64),

    #[error("empty job set")]
    EmptyJobSet,

    #[error("oracle size limit exceeded: {0}")]
    OracleLimit(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("document error at `{path}`: {message}")]
    Document { path: String, message: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
