//! Experiment front end for `mfw-core`: problem files, history CSVs, SVG
//! plots and the `mfw` subcommands.

pub mod commands;
pub mod history;
pub mod problem;
pub mod svg;

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] mfw_core::Error),

    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 usage/parse/IO, 2 solver failure, 3 verification failure.
    pub fn exit_code(&self) -> i32 {
        use mfw_core::Error as E;
        match self {
            CliError::Core(E::SolverFailure { .. } | E::InternalConsistency(_) | E::AtIteration { .. }) => 2,
            CliError::Verification(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
