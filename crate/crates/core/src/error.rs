use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rotation axis must be a unit vector (|n| = {norm})")]
    AxisNotNormalized { norm: f64 },

    #[error("operator is not Hermitian (max asymmetry {max_asymmetry:e})")]
    NotHermitian { max_asymmetry: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid gate parameters: {0}")]
    InvalidGate(String),

    #[error("invalid error model: {0}")]
    InvalidErrorModel(String),

    #[error("composite scheme needs at least 2 loops, got {0}")]
    TooFewLoops(u32),

    #[error("state vector is not normalized (norm {norm})")]
    StateNotNormalized { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("integrator step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("trace drifted by {drift:e} at t = {time} (segment {segment}); aborting")]
    TraceDrift { drift: f64, time: f64, segment: usize },

    #[error("unknown gate '{name}'; known gates: {known}")]
    UnknownGate { name: String, known: String },

    #[error("invalid sweep specification: {0}")]
    InvalidSweep(String),

    #[error("series fit residual {residual:e} exceeds {threshold:e}")]
    FitResidual { residual: f64, threshold: f64 },

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from invalid user input rather than a failed
    /// numerical check.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::TraceDrift { .. } | Error::FitResidual { .. } | Error::Io(_)
        )
    }
}
