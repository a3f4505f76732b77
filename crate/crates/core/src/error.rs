use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The third columns of the two rotations are (anti)parallel, so the
    /// two central planes coincide and there is no unique common line.
    #[error("degenerate pair: |r3_i x r3_j| = {0:e}")]
    DegeneratePair(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("too few images for synchronization: {0} (need at least 3)")]
    TooFewImages(usize),

    #[error("valid-pair graph is disconnected ({components} components)")]
    DisconnectedPairs { components: usize },

    #[error("SDP solver failed: {0}")]
    SolverFailure(String),

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
