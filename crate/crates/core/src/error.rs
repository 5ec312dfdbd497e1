use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signal must contain at least one sample")]
    EmptySignal,
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("reference signal has zero norm")]
    ZeroReference,
    #[error("invalid modulation parameters: {0}")]
    InvalidParams(String),
    #[error("delay {delay:e} s is off the sampling grid (nearest grid point {nearest:e} s)")]
    OffGridDelay { delay: f64, nearest: f64 },
    #[error("delay must be finite and non-negative, got {0}")]
    InvalidDelay(f64),
    #[error("invalid Volterra model: {0}")]
    InvalidModel(String),
    #[error("demodulator correction is singular at bin {bin}")]
    SingularCorrection { bin: usize },
    #[error("m-index entries must lie in 1..=4, got {0}")]
    InvalidMIndex(u8),
    #[error("regression data contains non-finite entries")]
    NonFiniteRegression,
    #[error("singular value decomposition did not converge")]
    SvdFailed,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
