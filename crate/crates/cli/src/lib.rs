//! Command-line front end for `tlfdeco-core`: configuration files, parameter
//! sweeps and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod output;

use std::path::Path;

/// Errors of a CLI run, mapped onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] tlfdeco_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} of {total} sweep points failed")]
    PartialSweep { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 config error, 2 numeric or output failure, 3 partial sweep failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Numeric(_) | Self::Io { .. } => 2,
            Self::PartialSweep { .. } => 3,
        }
    }
}
