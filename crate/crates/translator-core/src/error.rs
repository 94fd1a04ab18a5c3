//! Error type shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("node ({i}, {j}) is within {cells} cells of the z-boundary")]
    BoundaryProximity { i: usize, j: usize, cells: usize },
    #[error("non-finite value at node ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("profile is not graphical in z: {0}")]
    NotGraphical(String),
    #[error("non-positive radius: {0}")]
    NonPositiveRadius(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("insufficient z-extent: {0}")]
    InsufficientExtent(String),
    #[error("mean curvature not positive: {0}")]
    NonPositiveMeanCurvature(String),
    #[error("trajectory ended in blow-up near s = {0}")]
    BlowUp(f64),
    #[error("fit rejected: {0}")]
    DegenerateFit(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
