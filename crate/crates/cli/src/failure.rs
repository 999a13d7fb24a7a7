use std::fmt;
use std::path::Path;

use cdindex::io::IngestError;
use cdindex::AnalyticsError;

/// Everything a subcommand can fail with, grouped by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flag or config value, caught before any input is read.
    Validation(String),
    /// Malformed or inconsistent input data.
    Parse(anyhow::Error),
    /// Cross-check found differing values.
    Mismatch(String),
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Mismatch(_) => 4,
            Failure::Io(_) => 5,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Failure::Io(anyhow::anyhow!("{}: {err}", path.display()))
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure::Validation(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(msg) => write!(f, "invalid arguments: {msg}"),
            Failure::Parse(err) => write!(f, "bad input: {err}"),
            Failure::Mismatch(msg) => write!(f, "mismatch: {msg}"),
            Failure::Io(err) => write!(f, "i/o error: {err}"),
        }
    }
}

impl From<IngestError> for Failure {
    fn from(err: IngestError) -> Self {
        match err {
            IngestError::Io { .. } => Failure::Io(err.into()),
            IngestError::Parse { .. } | IngestError::Graph(_) => Failure::Parse(err.into()),
        }
    }
}

impl From<AnalyticsError> for Failure {
    fn from(err: AnalyticsError) -> Self {
        match err {
            AnalyticsError::Io(_) | AnalyticsError::Csv(_) => Failure::Io(err.into()),
            AnalyticsError::NonPositiveBinWidth(_) | AnalyticsError::InvalidFraction(_) => {
                Failure::Validation(err.to_string())
            }
            AnalyticsError::EmptyInput
            | AnalyticsError::MissingYear(_)
            | AnalyticsError::NoOverlap => Failure::Parse(err.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Io(err.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(err: csv::Error) -> Self {
        Failure::Io(err.into())
    }
}
