use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("frame error: {0}")]
    Frame(String),

    #[error("singular lambda: |lambda| = {value:e} at (u, v) = ({u}, {v})")]
    SingularLambda { u: f64, v: f64, value: f64 },

    #[error("regime error: {0}")]
    Regime(String),

    #[error(transparent)]
    Ode(#[from] OdeError),

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { location: location.into(), message: message.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Failures of the classifying ODE integrations. Every variant that stops an
/// integration carries the abscissa reached.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("blow-up at u = {u_stop}: {reason}")]
    BlowUp { u_stop: f64, reason: String },

    #[error("constraint violated at u = {u_stop}: {reason}")]
    Constraint { u_stop: f64, reason: String },

    #[error("singular denominator at u = {u_stop}: {reason}")]
    SingularDenominator { u_stop: f64, reason: String },

    #[error("reduction mismatch: literal residual {literal:e} exceeds 10x the first-integral residual {first_integral:e}")]
    ReductionMismatch { literal: f64, first_integral: f64 },
}

impl OdeError {
    /// Abscissa where the integration stopped, when applicable.
    pub fn u_stop(&self) -> Option<f64> {
        match self {
            OdeError::BlowUp { u_stop, .. }
            | OdeError::Constraint { u_stop, .. }
            | OdeError::SingularDenominator { u_stop, .. } => Some(*u_stop),
            _ => None,
        }
    }
}
