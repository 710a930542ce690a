//! Config-driven front end: single solves, sweeps, oracle checks and the
//! fixed reproduction bundles.

pub mod config;
pub mod output;
pub mod reproduce;
pub mod run;

pub use config::{Format, LoadedConfig, Problem, RunConfig};
pub use reproduce::{reproduce, Reproduction, Target};
pub use run::{run, Report, RunOutput};

use thiserror::Error;

/// Environment variable holding the worker-pool size.
pub const WORKERS_ENV: &str = "LAMBDAVAR_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<lambdavar_core::Error> for CliError {
    fn from(e: lambdavar_core::Error) -> Self {
        use lambdavar_core::Error as E;
        match e {
            E::Domain { .. } | E::InvalidDistribution(_) | E::InvalidLambda(_) | E::InvalidContract(_) => {
                CliError::Validation(e.to_string())
            }
            E::InfinitePremium | E::Numeric(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Numeric(format!("serialization failed: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_codes() {
        let bad = lambdavar_core::LambdaFunction::constant(1.5).unwrap_err();
        assert_eq!(CliError::from(bad).exit_code(), 2);
        assert_eq!(CliError::from(lambdavar_core::Error::InfinitePremium).exit_code(), 3);
        assert_eq!(CliError::from(lambdavar_core::Error::Numeric("x".into())).exit_code(), 3);
    }
}
