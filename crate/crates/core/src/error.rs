use thiserror::Error;

/// Errors raised by the analysis routines.
///
/// Several variants (`NonIntegerWinding`, `InconsistentCell`,
/// `CycleInconsistent`) never arise from valid data; they flag numerical or
/// orientation bugs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not connected (lambda2 = {lambda2:e})")]
    NotConnected { lambda2: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0} (need at least 2)")]
    InvalidDimension(usize),

    #[error("winding sum {sum} is not an integer multiple of 2*pi")]
    NonIntegerWinding { sum: f64 },

    #[error("cohesiveness angle {0} outside [0, pi]")]
    InvalidGamma(f64),

    #[error("value out of range: {0}")]
    InvalidRange(String),

    #[error("matrix does not leave the consensus space invariant (|Pi A 1| = {0:e})")]
    KernelNotInvariant(f64),

    #[error("state became non-finite at t = {time}")]
    NonFiniteState { time: f64 },

    #[error("state is not {gamma}-cohesive (max edge difference {max_diff})")]
    NotCohesive { max_diff: f64, gamma: f64 },

    #[error("edge differences inconsistent with winding cell (residual {residual:e})")]
    InconsistentCell { residual: f64 },

    #[error("edge values inconsistent on non-tree edge {edge} (mismatch {mismatch:e})")]
    CycleInconsistent { edge: usize, mismatch: f64 },

    #[error("singular Newton matrix at iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error("Newton did not converge in {iterations} iterations (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
