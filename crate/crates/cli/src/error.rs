use chemeval_core::corpus::{CorpusError, FixtureError};
use chemeval_core::MetricError;
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_UNDEFINED: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("undefined metric: {0}")]
    Undefined(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Undefined(_) => EXIT_UNDEFINED,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    /// Prefixes the message with the dataset it concerns.
    pub fn in_dataset(self, dataset: &str) -> CliError {
        match self {
            CliError::Input(m) => CliError::Input(format!("dataset {dataset}: {m}")),
            CliError::Undefined(m) => CliError::Undefined(format!("dataset {dataset}: {m}")),
            other => other,
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> CliError {
        CliError::Input(e.to_string())
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> CliError {
        match e {
            MetricError::Undefined(m) => CliError::Undefined(m),
            MetricError::InvalidParameter(m) => CliError::Input(m),
        }
    }
}

impl From<FixtureError> for CliError {
    fn from(e: FixtureError) -> CliError {
        CliError::Input(e.to_string())
    }
}
