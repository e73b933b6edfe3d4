use thiserror::Error;

/// Errors raised by the numerical kernels and bound computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QslError {
    /// An input broke a documented precondition (shape, Hermiticity, positivity...).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation too close to a pole of the decay rate.
    #[error("decay rate is singular near t = {pole} (requested t = {t})")]
    Singularity { t: f64, pole: f64 },

    #[error("target angle {target} never attained (max Theta_R = {max_theta})")]
    UnattainedTarget { target: f64, max_theta: f64 },

    /// Nothing evolves, so a speed-limit denominator vanishes.
    #[error("degenerate evolution: {0}")]
    DegenerateEvolution(String),

    #[error("bound not applicable: {0}")]
    InapplicableBound(String),

    #[error("integrator step {dt} too large: need dt <= {required_dt}")]
    Stability { dt: f64, required_dt: f64 },

    #[error("fidelity {0} outside [0, 1] beyond tolerance")]
    FidelityOutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, QslError>;

impl QslError {
    pub(crate) fn dims(expected: impl ToString, got: impl ToString) -> Self {
        QslError::DimensionMismatch {
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}
