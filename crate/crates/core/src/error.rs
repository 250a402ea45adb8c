use thiserror::Error;

/// Errors produced anywhere in the spectral engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("invalid factor index {index} for a layout with {count} factors")]
    InvalidFactor { index: usize, count: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("operator is not Hermitian (max |H - H^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("cutoff ceiling reached without convergence: {0}")]
    CutoffCeiling(String),

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("{mode} cutoff too small: truncation loss {loss:e} exceeds {limit:e}")]
    Truncation {
        mode: &'static str,
        loss: f64,
        limit: f64,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid sweep configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
