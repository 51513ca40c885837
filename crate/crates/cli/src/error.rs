//! Process-level error type carrying the exit-code contract: 2 for rejected
//! configuration, 3 when certified evaluation cannot decide a floor or a
//! wrap, 1 for anything else. Check-suite failures exit 4 but are not
//! errors; the report is still written.

use crate::config::ConfigError;
use ndf_core::digitstream::DigitError;
use ndf_core::harmonic::HarmonicError;
use ndf_core::stats::StatsError;
use ndf_core::EvalError;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Ambiguous(String),
    Io(std::io::Error),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Ambiguous(_) => 3,
            CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Ambiguous(m) => write!(f, "ambiguous evaluation: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Other(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::AmbiguousFloor { .. } | EvalError::AmbiguousFrac { .. } => {
                CliError::Ambiguous(e.to_string())
            }
            // a map dipping negative is a bad construction, not a precision failure
            EvalError::NegativeValue { .. } => CliError::Config(e.to_string()),
        }
    }
}

impl From<DigitError> for CliError {
    fn from(e: DigitError) -> Self {
        match e {
            DigitError::Eval(inner) => inner.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<HarmonicError> for CliError {
    fn from(e: HarmonicError) -> Self {
        match e {
            HarmonicError::Eval(inner) => inner.into(),
            HarmonicError::QuadratureFailure => CliError::Other(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Config(e.to_string())
    }
}
