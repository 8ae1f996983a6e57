use thiserror::Error;

/// Error taxonomy shared by every solver in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite state at r = {r} while {context}")]
    NonFinite { r: f64, context: &'static str },

    #[error("shooting map has no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("only {found} extrema below r = {r_max}, {requested} requested")]
    InsufficientRange {
        r_max: f64,
        found: usize,
        requested: usize,
    },

    #[error("operator has a radial Neumann kernel on the ball of radius {radius}")]
    Kernel { radius: f64 },

    #[error("mass is not defined at this order for N = {n} ({why})")]
    UnsupportedDimension { n: u32, why: &'static str },

    #[error("moment diverges for N = {n}")]
    DivergentMoment { n: u32 },

    #[error("operation requires N = {expected}, got N = {got}")]
    DimensionError { expected: u32, got: u32 },

    #[error("exponent regime violation: {0}")]
    RegimeError(String),

    #[error("branch tail has {got} usable points, {requested} requested")]
    InsufficientTail { got: usize, requested: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
