use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter combination that cannot produce a valid simulation.
    #[error("configuration error: {0}")]
    Config(String),

    /// Vectors or matrices whose shapes do not chain.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// A loss or parameter became NaN or infinite.
    #[error("training fault: {0}")]
    Training(String),

    /// The swimmer state stopped being finite during an episode.
    #[error("episode fault at t = {time}: {reason}")]
    Episode { time: f64, reason: String },

    #[error("weight file: {0}")]
    Persistence(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
