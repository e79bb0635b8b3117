//! Report builders behind the `electorate` command-line tool.

pub mod analyze;
pub mod figure;
pub mod output;
pub mod tables;
pub mod verify;

use electorate_core::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] Error),

    #[error("invalid arguments: {0}")]
    Usage(String),

    #[error("cannot write {0}: {1}")]
    Io(String, #[source] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(Error::EnumerationTooLarge { .. }) => 3,
            CliError::Model(_) | CliError::Usage(_) => 2,
            CliError::Io(..) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Model(e) => e.kind(),
            CliError::Usage(_) => "InvalidArguments",
            CliError::Io(..) => "Io",
        }
    }

    /// Machine-readable error object printed on failure.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
            .to_string()
    }
}
