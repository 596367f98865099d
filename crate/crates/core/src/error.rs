use thiserror::Error;

use crate::projection::ReprojectionReport;

/// Errors produced by the reconstruction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("insufficient correspondences: need at least 4, got {got}")]
    InsufficientCorrespondences { got: usize },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("projection singularity: mapped point lies at infinity")]
    ProjectionSingularity,

    #[error("calibration failed: {reason}")]
    Calibration {
        reason: String,
        report: Option<ReprojectionReport>,
    },

    #[error("insufficient data: need at least {needed} present samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("planning error: {0}")]
    Planning(String),

    #[error("time {t} outside span [{start}, {end}]")]
    Range { t: f64, start: f64, end: f64 },

    #[error("data unavailable: {0}")]
    DataUnavailable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        match err.classify() {
            serde_json::error::Category::Io => Error::Io(err.into()),
            serde_json::error::Category::Data => Error::Validation(err.to_string()),
            _ => Error::Parse {
                line: err.line(),
                column: err.column(),
                message: err.to_string(),
            },
        }
    }
}
