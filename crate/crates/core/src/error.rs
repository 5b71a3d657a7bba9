//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by callers that map errors to exit codes:
/// validation errors are caller mistakes or violated geometric conditions,
/// numerical errors are convergence failures of an otherwise valid job.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point ({0:.6}, {1:.6}, {2:.6}) is not interior to the body")]
    NotInterior(f64, f64, f64),

    #[error("ray bracketing failed within 2x bounding radius; body spec inconsistent")]
    BracketingFailed,

    #[error("non-finite curvature at s = {s}")]
    NonFiniteCurvature { s: f64 },

    #[error("too few curve samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("corner in curve: tangent jump of {angle:.3e} rad near s = {s:.6} exceeds 1e-3")]
    CornerDetected { s: f64, angle: f64 },

    #[error(
        "condition (3): 1-u*kn+v*kg <= 0 at s={s:.6}, u={u:.6}, v={v:.6} (margin {margin:.3e})"
    )]
    DiffeoViolated { s: f64, u: f64, v: f64, margin: f64 },

    #[error(
        "section centroid offset {offset:.3e} at s={s:.6} exceeds {tol:.3e}; \
         the ribbon is not a centroid curve of the body, so the slice centroid \
         formula does not apply"
    )]
    NotCentroidCurve { s: f64, offset: f64, tol: f64 },

    #[error("condition ({condition}): {detail}")]
    RodCondition { condition: char, detail: String },

    #[error("quadrature did not converge: achieved estimate {achieved:.12e} with error {error:.3e} > tolerance {tol:.3e}")]
    QuadratureFailed { achieved: f64, error: f64, tol: f64 },

    #[error("sphere minimization did not converge from any start: best residual {best_residual:.3e} at normal ({nx:.4}, {ny:.4}, {nz:.4})")]
    MinimizerFailed {
        best_residual: f64,
        nx: f64,
        ny: f64,
        nz: f64,
    },

    #[error(
        "start point has {count} distinct minimizing cut normals (volume spread {spread:.3e}); \
         the minimizer is not unique this deep in the body, choose a start point closer \
         to the boundary"
    )]
    AmbiguousStart { count: usize, spread: f64 },

    #[error("trace step failure at s = {s:.6}: {detail}")]
    StepFailure { s: f64, detail: String },

    #[error("degenerate boundary curve: perimeter {0:.3e} below 1e-12")]
    DegenerateBoundary(f64),

    #[error("trace stopped for `{actual}`, not at the small-volume boundary side")]
    WrongStopReason { actual: String },

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidInput(_) | NotInterior(..) | TooFewSamples { .. } | CornerDetected { .. }
            | DiffeoViolated { .. } | NotCentroidCurve { .. } | RodCondition { .. }
            | DegenerateBoundary(_) | WrongStopReason { .. } | Csv(_) | Json(_)
            | AmbiguousStart { .. } => ErrorClass::Validation,
            BracketingFailed | NonFiniteCurvature { .. } | QuadratureFailed { .. }
            | MinimizerFailed { .. } | StepFailure { .. } => ErrorClass::Numerical,
            Io(_) => ErrorClass::Io,
        }
    }
}
