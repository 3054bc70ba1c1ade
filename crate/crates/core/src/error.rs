use thiserror::Error;

/// Errors produced by the invariant computations, the oracle and file I/O.
#[derive(Debug, Error)]
pub enum GeoError {
    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("n ≥ {need} required (got n = {got})")]
    TooFewPoints { need: usize, got: usize },

    #[error("{what} limited to n ≤ {max} (got n = {got}); {hint}")]
    TooLarge {
        what: &'static str,
        max: usize,
        got: usize,
        hint: &'static str,
    },

    #[error("index {index} out of range for n = {n}")]
    Index { index: usize, n: usize },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("power sums overflow: max |s| = {max_abs:e} raised to power {power}")]
    PowOverflow { max_abs: f64, power: usize },

    #[error("matrix is not positive semi-definite (smallest eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GeoError>;
