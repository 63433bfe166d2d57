//! Batch front end for `bookrec-core`: file loading, run configuration,
//! report rendering, and the subcommand pipelines behind the `bookrec`
//! binary. Everything here is deterministic given the same inputs and seed.

pub mod config;
pub mod io;
pub mod pipeline;
pub mod report;

/// Failures split by exit code: usage problems (exit 2) name the offending
/// flag, data problems (exit 1) name the file and line that broke.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Data(err)
    }
}

impl core::fmt::Display for CliError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Data(err) => write!(f, "{err:#}"),
        }
    }
}
