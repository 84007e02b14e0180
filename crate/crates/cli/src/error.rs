use std::path::Path;

use thiserror::Error;

use aivd_core::aibom::AibomError;
use aivd_core::catalog::CatalogError;
use aivd_core::ids::IdError;
use aivd_core::record::RecordError;
use aivd_core::registry::RegistryError;
use aivd_core::severity::{ScoreError, VectorError};
use aivd_service::ServiceError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_DOMAIN: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// A failed command: an error code, a one-line message and an exit status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{code}: {message}")]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: u8,
}

impl CliError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
            exit: exit_for(code),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: "USAGE".into(),
            message: message.into(),
            exit: EXIT_USAGE,
        }
    }

    pub fn read(path: &Path, err: std::io::Error) -> Self {
        Self::new("IO_ERROR", format!("{}: {err}", path.display()))
    }

    /// The message as it goes to standard error.
    pub fn line(&self) -> String {
        let text = format!("error: {self}");
        text.split_whitespace().collect::<Vec<_>>().join(" ")
    }
}

/// Exit status for an error code.
pub fn exit_for(code: &str) -> u8 {
    match code {
        "IO_ERROR" | "CORRUPT_STORE" | "CORRUPT_EVENT" | "GAP_IN_SEQUENCE" | "BIND_FAILURE" => EXIT_IO,
        "USAGE" | "BAD_FILTER" => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

impl From<RegistryError> for CliError {
    fn from(e: RegistryError) -> Self {
        match &e {
            RegistryError::ValidationFailed(report) => Self::new(
                e.code(),
                format!("{} error(s): {}", report.errors().count(), first_error(report)),
            ),
            _ => Self::new(e.code(), e.to_string()),
        }
    }
}

fn first_error(report: &aivd_core::validation::ValidationReport) -> String {
    report.errors().next().map(ToString::to_string).unwrap_or_default()
}

impl From<ServiceError> for CliError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Registry(inner) => inner.into(),
            other => Self::new(other.code(), other.to_string()),
        }
    }
}

macro_rules! from_coded {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::new(e.code(), e.to_string())
            }
        }
    )*};
}

from_coded!(RecordError, CatalogError, AibomError, IdError, VectorError, ScoreError);
