use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// A configuration field is missing, malformed or out of range.
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] coupon_core::Error),
}

impl LabError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for configuration or validation errors, 2 for I/O
    /// errors, 3 when an exact enumeration exceeds its budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } => 2,
            Self::Core(coupon_core::Error::BudgetExceeded { .. }) => 3,
            Self::Config { .. } | Self::Json(_) | Self::Core(_) => 1,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
