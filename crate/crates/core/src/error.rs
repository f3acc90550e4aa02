use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate region: could not place point {index} after {attempts} attempts")]
    DegenerateRegion { index: usize, attempts: usize },

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("instance with {n} vertices exceeds the exact solver limit of {max}; use reference_optimum")]
    SizeExceeded { n: usize, max: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
