//! Error type with the stable exit-code contract:
//! 0 success, 2 config, 3 unknown scenario, 4 pipeline, 5 input parse,
//! 6 degenerate fit.

use cheshire_core::ExperimentError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    UnknownScenario(String),
    #[error("pipeline: {0}")]
    Pipeline(String),
    #[error("{path}:{line}: {message}")]
    InputParse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::UnknownScenario(_) => 3,
            CliError::Pipeline(_) | CliError::Io(_) => 4,
            CliError::InputParse { .. } => 5,
            CliError::DegenerateFit(_) => 6,
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Fit(fit) => CliError::DegenerateFit(fit.to_string()),
            other => CliError::Pipeline(other.to_string()),
        }
    }
}
