use std::path::PathBuf;

use horolab::LabError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    ConfigParse(String),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("component {index}: {source}")]
    Component {
        index: usize,
        #[source]
        source: LabError,
    },
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("{failed} assertion(s) failed")]
    AssertionFailed { failed: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigRead { .. } | CliError::ConfigParse(_) | CliError::SchemaViolation(_) => 2,
            CliError::Component { source, .. } | CliError::Lab(source) if is_parameter_error(source) => 2,
            _ => 1,
        }
    }
}

fn is_parameter_error(e: &LabError) -> bool {
    matches!(
        e,
        LabError::InvalidCasimir { .. }
            | LabError::TruncationTooSmall { .. }
            | LabError::NegativeOrderUnsupported { .. }
            | LabError::InvalidTolerance { .. }
            | LabError::GapViolation { .. }
    )
}
