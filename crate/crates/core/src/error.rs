use thiserror::Error;

/// Failure of an iterative or direct solver. Kept separate from argument
/// errors so callers can tell a bad request from a numerical breakdown.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("linear system of size {size} is numerically singular")]
    Singular { size: usize },
    #[error("least squares with {rows} rows cannot determine {cols} unknowns")]
    Underdetermined { rows: usize, cols: usize },
    #[error("{method} did not converge after {iterations} iterations (last change {last_change:e})")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        last_change: f64,
    },
    #[error("unsupported solver configuration: {0}")]
    Unsupported(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 16")]
    InvalidGrid(usize),
    #[error("aliasing guard: {samples} samples cannot resolve degree {kmax} (need samples >= 4 * degree)")]
    Aliasing { samples: usize, kmax: usize },
    #[error("{what} = {value} is out of range (allowed {min}..={max})")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },
    #[error("window radius {0} outside [0, pi]")]
    InvalidWindow(f64),
    #[error("Lebesgue exponent {0} must be >= 1 or infinity")]
    InvalidExponent(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl Error {
    pub(crate) fn range(what: &'static str, value: usize, min: usize, max: usize) -> Self {
        Error::OutOfRange {
            what,
            value: value as i64,
            min: min as i64,
            max: max as i64,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
