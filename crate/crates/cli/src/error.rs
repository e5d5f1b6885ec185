use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Internal(String),
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => EXIT_INPUT,
            CliError::Solver(_) | CliError::Internal(_) => EXIT_SOLVER,
        }
    }
}
