use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Arguments outside the domain of an operation (bad quantum numbers, negative widths, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// |p| = 1 has no finite epsilon; carries the epsilon clamped at the configured bound.
    #[error("orientation p = {p} is a limit point; epsilon clamped to {clamped_epsilon:e}")]
    OrientationLimit { p: f64, clamped_epsilon: f64 },

    /// Zero linewidth evaluated exactly on resonance.
    #[error("singular response: {0}")]
    Singular(String),

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("invalid pulse schedule: {0}")]
    InvalidSchedule(String),

    /// Periodic steady state not reached within the cycle cap.
    #[error("no periodic steady state at {frequency_hz} Hz after {cycles} cycles (last change {last_change:e})")]
    Convergence {
        frequency_hz: f64,
        cycles: usize,
        last_change: f64,
    },

    #[error("initialization failed: {0}")]
    Initialization(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("regression failed: {0}")]
    Regression(String),

    #[error("invalid fit problem: {0}")]
    FitProblem(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
