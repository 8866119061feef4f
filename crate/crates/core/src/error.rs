use thiserror::Error;

/// Errors raised by the spectral routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph family: {0}")]
    InvalidFamily(String),

    #[error("lattice side must be at least 2, got {0}")]
    SideTooSmall(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("energy {energy} coincides with the pole at {pole}")]
    PoleHit { energy: f64, pole: f64 },

    #[error("no sign change in bracket {index} ({lo}, {hi}) of the secular equation")]
    BracketFailure { index: usize, lo: f64, hi: f64 },

    #[error("integral I(j={j}, d={d}) diverges: requires d > 2j")]
    DivergentIntegral { j: u32, d: u32 },

    #[error("lattice sum c(j={j}, d={d}) diverges: requires 2j > d")]
    DivergentLatticeSum { j: u32, d: u32 },

    #[error("no root of G_{dim}(x) = {target} found on (-inf, 0)")]
    NoRoot { dim: u32, target: f64 },

    #[error("dense oracle limited to N <= {cap}, got N = {n}")]
    OracleCapExceeded { n: usize, cap: usize },

    #[error("gamma = {gamma} lies within the critical window around {gamma_c} (margin {margin})")]
    WithinCriticalWindow {
        gamma: f64,
        gamma_c: f64,
        margin: f64,
    },

    #[error("operation not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
