use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: a subsystem needs at least two levels")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector of length {0} does not devectorize to a square matrix")]
    NotSquareLength(usize),

    #[error("operator is not Hermitian (relative Frobenius deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("no subsystem labelled `{0}` in the layout")]
    UnknownSubsystem(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("tridiagonal eigensolver failed to converge on eigenvalue {index} after {iterations} iterations")]
    EigenNoConvergence { index: usize, iterations: usize },

    #[error("target {target:.6e} rad/s lies outside the tunable range [{min:.6e}, {max:.6e}] rad/s")]
    OutOfRange { target: f64, min: f64, max: f64 },

    #[error("Liouvillian is not trace preserving (defect {defect:.3e})")]
    NotTracePreserving { defect: f64 },

    #[error(
        "steady state is not unique (relative residual {residual:.3e}); add a symmetry-breaking \
         rate such as a nonzero relaxation on every subsystem"
    )]
    DegenerateSteadyState { residual: f64 },

    #[error("steady-state iteration stopped after {iterations} sweeps with relative change {change:.3e}")]
    SteadyStateNoConvergence { iterations: usize, change: f64 },

    #[error("solve failed at flux {flux}, probe {probe:.9e} rad/s: {source}")]
    AtGridPoint {
        flux: f64,
        probe: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("linewidth fit did not converge after {iterations} iterations (best cost {cost:.3e})")]
    FitNoConvergence {
        iterations: usize,
        cost: f64,
        best: [f64; 4],
    },

    #[error("fit needs {needed} samples spanning two linewidths, got {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("network is singular at {omega:.6e} rad/s")]
    SingularFrequency { omega: f64 },
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
