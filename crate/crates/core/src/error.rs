use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),

    #[error("malformed map descriptor: {0}")]
    MalformedDescriptor(String),

    #[error("malformed image: {0}")]
    MalformedImage(String),

    #[error("invalid thresholds: occupied_thresh {occupied} < free_thresh {free}")]
    InvalidThresholds { occupied: f64, free: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("point or index is outside the map")]
    OutOfBounds,

    #[error("map has no free cell")]
    NoFreeCell,

    #[error("no path between start and goal")]
    NoPath,

    #[error("invalid search problem: {0}")]
    InvalidProblem(String),

    #[error("parent chain does not terminate")]
    CorruptParentChain,

    #[error("timestep must be positive, got {0}")]
    NonPositiveTimestep(f64),

    #[error("robot position coincides with the landmark")]
    DegenerateRange,

    #[error("innovation covariance is singular")]
    SingularInnovation,

    #[error("path is empty")]
    EmptyPath,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
