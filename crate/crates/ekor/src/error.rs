use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported affine type {family}{rank}: {reason}")]
    UnsupportedType { family: String, rank: usize, reason: String },
    #[error("invalid diagram automorphism: {0}")]
    InvalidSigma(String),
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("cannot parse element `{0}`")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant breach: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
