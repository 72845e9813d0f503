//! Pipeline stages behind the `closed-char` binary.

use closed_char::Error;

pub mod config;
pub mod indices;
pub mod orbits;
pub mod output;
pub mod resonance;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("solver error: {0}")]
    Solver(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::CriticalType(_) | Error::Dimension(_) | Error::Range(_) | Error::FamilyDegeneracy { .. } => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Solver(e.to_string()),
        }
    }
}

