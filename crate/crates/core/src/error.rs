use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("polynomial degree N must be nonnegative, got {0}")]
    NegativeDegree(i64),

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("beta3 must be positive, got {0}")]
    NonPositiveBeta3(f64),

    #[error("E = {energy} is not a root of the characteristic polynomial (row residual {residual:e})")]
    NotAnEigenvalue { energy: f64, residual: f64 },

    #[error("no real solution: {0}")]
    NoRealSolution(String),

    #[error("degenerate closed form: {0}")]
    Degenerate(String),

    #[error("no zero-energy solution for N = {0} (N = 2 + 3k)")]
    NoZeroEnergySolution(usize),

    #[error("continuity holds for every beta2 in this family; beta2 must be supplied")]
    FreeBeta2,

    #[error("wavefunction is identically zero and cannot be normalized")]
    NotNormalizable,

    #[error("no spectral level within {tol:e} of E = {energy}")]
    NoMatch { energy: f64, tol: f64 },

    #[error("{count} spectral levels within {tol:e} of E = {energy}")]
    AmbiguousMatch { energy: f64, tol: f64, count: usize },

    #[error("oracle not converged: level disagreement {disagreement:e} exceeds {limit:e}")]
    NonConvergence { disagreement: f64, limit: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid mode at beta1 = {beta1}: {reason}")]
    InvalidMode { beta1: f64, reason: String },
}
