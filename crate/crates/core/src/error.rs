use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("insufficient data: need at least {required}, got {available}")]
    InsufficientData { required: usize, available: usize },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error(
        "no convergence after {iterations} iterations (last change {last_change:e}, at {location})"
    )]
    Convergence {
        iterations: usize,
        last_change: f64,
        location: String,
    },

    #[error("singular regression: collinear columns [{}]", .columns.join(", "))]
    Singular { columns: Vec<String> },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("unidentifiable model: {0}")]
    Unidentifiable(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
