use std::io;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("root solver did not converge (residual {residual:e})")]
    Solver { residual: f64 },

    #[error("invalid experiment spec: {0}")]
    Spec(String),

    #[error("nothing to run")]
    NothingToRun,

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig { field, reason: reason.into() }
    }

    /// Short machine-readable tag, used in the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidConfig { .. } => "invalid_config",
            Error::Numeric(_) => "numeric",
            Error::Domain(_) => "domain",
            Error::Solver { .. } => "solver",
            Error::Spec(_) => "spec",
            Error::NothingToRun => "nothing_to_run",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
