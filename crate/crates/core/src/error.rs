use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("point {point} lies within {clearance} of the singular point {singular}")]
    NearSingular {
        point: String,
        singular: String,
        clearance: f64,
    },

    #[error("continuation along `{path}` failed: {reason}")]
    Continuation { path: String, reason: String },

    #[error("integer extraction for loop `{path}` failed: residual {residual:.3e} exceeds {tolerance:.1e}")]
    Extraction {
        path: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("loop `{0}` does not return every section branch sign to its start value")]
    OpenOnCover(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
