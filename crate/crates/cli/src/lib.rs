//! Experiment orchestration for the `rwsre` binary: configuration, seeded
//! dispatch to the core library, and JSON/CSV/TSV reports.

pub mod commands;
pub mod config;
pub mod output;
pub mod report;

pub use commands::{run_command, Command};
pub use config::{RunConfig, RunParams, SweepBound, SweepConfig};
pub use report::{ExperimentReport, PlotSeries, Table, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(rwsre::Error),
    #[error("output error: {0}")]
    Output(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Core errors that reflect a bad request rather than a failed run.
    pub fn from_core(e: rwsre::Error) -> Self {
        use rwsre::Error as E;
        match e {
            E::Config(_) | E::Domain(_) | E::WrongRegime(_) | E::UnsupportedRegime(_) => CliError::Config(e.to_string()),
            other => CliError::Core(other),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl From<rwsre::Error> for CliError {
    fn from(e: rwsre::Error) -> Self {
        CliError::from_core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
