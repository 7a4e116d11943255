//! Crate-wide error type with stable process exit codes.

/// Errors surfaced by library operations and the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A scalar parameter fell outside its admissible interval.
    #[error("{param} = {value} is outside the admissible {admissible}")]
    Domain {
        param: &'static str,
        value: f64,
        admissible: &'static str,
    },

    /// A matrix failed a state-validity check (Hermiticity, positivity, trace).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A quantity that must be real or normalized drifted beyond tolerance.
    #[error("numerical integrity violated: {0}")]
    NumericalIntegrity(String),

    /// An estimator had no samples in a required cell.
    #[error("estimate undefined: {0}")]
    UndefinedEstimate(String),

    /// Malformed command-line input or config file.
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI. Distinct codes per error class:
    /// 2 usage, 3 domain/state, 4 numerical integrity, 5 undefined estimate.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Domain { .. } | Error::InvalidState(_) => 3,
            Error::NumericalIntegrity(_) => 4,
            Error::UndefinedEstimate(_) => 5,
            Error::Io(_) => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidState(format!("serialization: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks a scalar against a closed interval, producing a domain error
/// that names the parameter and the admissible range.
pub fn check_range(
    param: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    admissible: &'static str,
) -> Result<f64> {
    if !value.is_finite() || value < lo || value > hi {
        return Err(Error::Domain {
            param,
            value,
            admissible,
        });
    }
    Ok(value)
}
