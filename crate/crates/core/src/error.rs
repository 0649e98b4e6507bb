use thiserror::Error;

/// Errors shared by every module of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// The subdivision budget ran out before the requested tolerance was met.
    /// Carries the best estimate so callers can decide whether it is usable.
    #[error("accuracy not reached: best estimate {best:e} with error estimate {error:e}")]
    Accuracy { best: f64, error: f64 },

    #[error("non-finite function value at x = {x}")]
    Evaluation { x: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {flo:e}, f(hi) = {fhi:e}")]
    NoBracket { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("density must be positive on the support interior: {0}")]
    Positivity(String),

    #[error("sample length mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },

    #[error("postcondition failed: {0}")]
    Postcondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
