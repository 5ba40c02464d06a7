use std::path::PathBuf;

use gks_core::simulator::ScenarioError;
use gks_core::SchemeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: SchemeError },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Scenario(ScenarioError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Scheme(e) => e.code(),
            CliError::Scenario(ScenarioError::UnknownScenario(_)) => "unknown-scenario",
            CliError::Scenario(_) => "scenario",
            CliError::Io { .. } => "io",
            CliError::Internal(_) => "internal",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Scenario(ScenarioError::UnknownScenario(_)) => 2,
            CliError::Scheme(SchemeError::Codec(_) | SchemeError::ParameterError(_)) => 2,
            CliError::Scheme(_) => 1,
            CliError::Scenario(_) | CliError::Io { .. } | CliError::Internal(_) => 3,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Scenario(e)
    }
}
