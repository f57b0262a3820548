use alloc::string::String;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("m must be >= {min}, got {got}")]
    TooFewOscillators { min: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("step size underflow at t = {t}")]
    StepFailure { t: f64 },
    #[error("no convergence before t = {t}")]
    NoConvergence { t: f64 },
    #[error("start lies below the high-potential region (gap {gap} > epsilon {epsilon})")]
    BelowHighRegion { gap: f64, epsilon: f64 },
    #[error("Y = w/|grad V|^2 diverged to {y}: orbit approaches a singular point")]
    SingularApproach { y: f64 },
    #[error("Newton iteration found no admissible solution")]
    NoSolution,
    #[error("normal frame is degenerate (Gram determinant {det})")]
    DegenerateFrame { det: f64 },
    #[error("curve passes within {tol} of the template")]
    TouchesTemplate { tol: f64 },
    #[error("lifted curve does not close in the universal cover")]
    OpenLift,
    #[error("invalid sentence: {0}")]
    InvalidSentence(String),
    #[error("boundary of boundary is nonzero in degree {dim}")]
    BoundaryNotZero { dim: usize },
    #[error("tangent estimation failed: {0}")]
    Tangent(String),
}

pub type Result<T> = core::result::Result<T, Error>;
