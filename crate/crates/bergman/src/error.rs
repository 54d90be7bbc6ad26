use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite integrand value at {point}")]
    NonFinite { point: String },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("point beyond tree depth: d(0,z) = {distance}, limit {limit}")]
    OutOfDepth { distance: f64, limit: f64 },

    #[error("candidate pool exhausted at level {level}: {detail}")]
    Resolution { level: usize, detail: String },

    #[error("basis Gram matrix condition {0:.3e} exceeds guard; reduce D")]
    Conditioning(f64),

    #[error("truncated mass {mass:.3e} exceeds guard {guard:.3e}; enlarge D")]
    Truncation { mass: f64, guard: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("symbol parse error: {0}")]
    Symbol(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
