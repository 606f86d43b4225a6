use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("period-detection window too small: n = {0} (need n >= 1)")]
    WindowTooSmall(usize),

    #[error("entry oracle failed at ({row}, {col}): {reason}")]
    OracleFailure { row: i64, col: i64, reason: String },

    #[error("lattice of {requested} points exceeds the configured budget of {budget}")]
    PointBudgetExceeded { requested: f64, budget: f64 },

    #[error(
        "free-spectrum collision: z = {z} hits shift + |k|^2 for k = 2pi*{mode} (shift {shift}); use the other shift"
    )]
    FreeSpectrumCollision { z: Complex64, shift: Complex64, mode: i64 },

    #[error("shift {0} makes the free operator singular")]
    SingularShift(Complex64),

    #[error("potential evaluation failed at x = {x}: {reason}")]
    PotentialEvaluation { x: f64, reason: String },

    #[error("expression parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("root finder did not converge after {sweeps} sweeps (best residual {residual:e})")]
    RootsNotConverged { sweeps: usize, residual: f64 },

    #[error("eigenvalue computation failed for a {0}x{0} matrix")]
    EigenFailure(usize),

    #[error("integration overflow at lambda = {lambda}: |Y| reached {magnitude:e}")]
    Overflow { lambda: Complex64, magnitude: f64 },

    #[error("singular point x0 = {x0} is not covered by the cutoff plateau of width 1/{n} around {center}")]
    SingularOutsidePlateau { x0: f64, center: f64, n: usize },

    #[error("matrix of dimension {dim} exceeds the configured budget {budget}")]
    MatrixTooLarge { dim: usize, budget: usize },

    #[error("point set is empty")]
    EmptySet,

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, SpectraError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> SpectraError {
    SpectraError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
