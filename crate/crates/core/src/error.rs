use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid duration {0}: must be finite and positive")]
    InvalidDuration(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("argument outside the principal-branch domain: {0}")]
    BranchDomain(String),

    #[error("invalid order {0}: must be at least {1}")]
    InvalidOrder(u32, u32),

    #[error("c_{n} exceeds the representable range (log value {log_value:.3})")]
    OverflowSaturation { n: u32, log_value: f64 },

    #[error("invalid tick threshold {0}: must be finite and positive")]
    InvalidThreshold(f64),

    #[error("invalid time {0}: must be finite and positive")]
    InvalidTime(f64),

    #[error("need at least 2 trajectories, got {0}")]
    InsufficientSamples(usize),

    #[error("integration step too large at t = {t}: {reason}")]
    StepTooLarge { t: f64, reason: String },
}
