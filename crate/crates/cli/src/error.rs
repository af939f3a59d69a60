//! CLI error taxonomy and the exit-code contract: 1 for validation and
//! parse failures on inputs, 2 for runtime failures (simulation, fitting,
//! writing results).

use crate::history::HistoryError;
use sdsim_core::calibration::CalibrationError;
use sdsim_core::scenario::ScenarioError;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad command line.
    Usage(String),
    /// An input file could not be read.
    Input { path: String, message: String },
    /// A scenario document failed to load or validate.
    Scenario { path: String, source: ScenarioError },
    /// A history CSV failed to ingest.
    History(HistoryError),
    /// A trajectory file failed to parse.
    Trajectory { path: String, message: String },
    /// Horizon evaluation rejected the inputs.
    Evaluation { path: String, source: ScenarioError },
    /// The simulation itself failed.
    Run { path: String, source: ScenarioError },
    /// Parameter estimation failed on otherwise well-formed data.
    Calibration { path: String, source: CalibrationError },
    /// A result file could not be written.
    Output { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::Input { .. }
            | CliError::Scenario { .. }
            | CliError::History(_)
            | CliError::Trajectory { .. }
            | CliError::Evaluation { .. } => 1,
            CliError::Run { .. } | CliError::Calibration { .. } | CliError::Output { .. } => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(message) => write!(f, "{message}"),
            CliError::Input { path, message } => write!(f, "{path}: {message}"),
            CliError::Scenario { path, source } => write!(f, "{path}: {source}"),
            CliError::History(source) => write!(f, "{source}"),
            CliError::Trajectory { path, message } => write!(f, "{path}: {message}"),
            CliError::Evaluation { path, source } => write!(f, "{path}: {source}"),
            CliError::Run { path, source } => write!(f, "{path}: {source}"),
            CliError::Calibration { path, source } => write!(f, "{path}: {source}"),
            CliError::Output { path, message } => write!(f, "{path}: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<HistoryError> for CliError {
    fn from(source: HistoryError) -> Self {
        CliError::History(source)
    }
}
