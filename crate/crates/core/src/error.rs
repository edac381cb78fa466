use thiserror::Error;

/// Every failure the library reports. Validation failures map to CLI exit
/// code 1, the rest to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid process spec: {0}")]
    InvalidSpec(String),
    #[error("resource limit: {what} would exceed the cap of {cap}")]
    ResourceLimit { what: &'static str, cap: u64 },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("invalid scale {0}: normalization must be positive")]
    InvalidScale(f64),
    #[error("degenerate horizon: window {window} does not fit in horizon {horizon}")]
    DegenerateHorizon { window: f64, horizon: f64 },
    #[error("invalid tolerance {0}: must be positive and finite")]
    InvalidTolerance(f64),
    #[error("invalid level {0}: must be positive and finite")]
    InvalidLevel(f64),
    #[error("incompatible grids: resolution {left} vs {right}")]
    IncompatibleGrids { left: usize, right: usize },
    #[error("distance to an empty set is undefined")]
    UndefinedDistance,
    #[error("invalid radius {0}: must be non-negative")]
    InvalidRadius(f64),
    #[error("invalid grid function: {0}")]
    InvalidFunction(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid config at `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{0} already holds a completed run; pass --force to overwrite")]
    RunExists(String),
    #[error("report: {0}")]
    Report(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by the run itself.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::ResourceLimit { .. } | Error::Io(_) | Error::Report(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
