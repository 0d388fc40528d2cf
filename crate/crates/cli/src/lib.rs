//! Library side of the `dirac-gaps` binary: configuration, table output,
//! subcommands and the acceptance checks run by `verify`.

pub mod checks;
pub mod commands;
pub mod config;
pub mod literal;
pub mod table;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Argument(String),

    #[error("{0}")]
    Io(String),

    #[error("{failed} row(s) did not converge")]
    NonConvergence { failed: usize },

    #[error("{failed} check(s) failed")]
    VerifyFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed { .. } => 1,
            CliError::Argument(_) | CliError::Io(_) => 2,
            CliError::NonConvergence { .. } => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Core errors caused by the input itself rather than by the numerics.
pub fn is_argument_error(e: &dirac_gaps::Error) -> bool {
    matches!(
        e,
        dirac_gaps::Error::InvalidArgument(_) | dirac_gaps::Error::ZeroCoefficient { .. } | dirac_gaps::Error::TooLarge { .. }
    )
}
