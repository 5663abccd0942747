use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("invalid alternative neighbourhood at vertex {vertex}: {reason}")]
    InvalidNeighbourhood { vertex: String, reason: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no alternative unit flow exists (residual {0:.3e})")]
    Infeasible(f64),
    #[error("not a projector: {0}")]
    NotProjector(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("generator failed: {0}")]
    Generator(String),
    #[error("oracle: {0}")]
    Oracle(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
