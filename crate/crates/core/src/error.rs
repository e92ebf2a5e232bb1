use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("value {value} outside admissible range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    /// An implicit solve did not converge.
    #[error("step failed at t = {time}: {reason} (residual {residual:e})")]
    StepFailure {
        time: f64,
        residual: f64,
        reason: String,
    },

    #[error("numerical blow-up at t = {time}: {reason}")]
    NumericalBlowup { time: f64, reason: String },

    #[error("initial projection failed (residual {residual:e})")]
    ProjectionFailure { residual: f64 },

    #[error("barrier construction failed: {0}")]
    ConstructionFailure(String),

    #[error("{}", match .line { Some(l) => format!("config line {l}: {}", .message), None => .message.clone() })]
    Config { line: Option<usize>, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(line: usize, message: impl Into<String>) -> Self {
        Error::Config {
            line: Some(line),
            message: message.into(),
        }
    }

    pub(crate) fn config_global(message: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            message: message.into(),
        }
    }
}
