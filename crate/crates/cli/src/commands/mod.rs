use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::report::ExperimentReport;
use crate::{CliError, CliResult};

mod classify;
mod dual_check;
mod env_dump;
mod identities;
mod kappa;
mod sinai;
mod speed;
mod stable;
mod sweep;

pub use classify::{cmd_classify, run_classify, ClassifyOutcome};
pub use dual_check::{cmd_dual_check, run_dual_check, DualCheckOutcome};
pub use env_dump::cmd_env_dump;
pub use identities::{cmd_identities, run_identities, IdentitiesOutcome};
pub use kappa::{cmd_kappa, run_kappa, KappaOutcome};
pub use sinai::{cmd_sinai, run_sinai, SinaiOutcome};
pub use speed::{cmd_speed, run_speed, SpeedOutcome};
pub use stable::{cmd_stable, run_stable, StableOutcome};
pub use sweep::{cmd_sweep, run_sweep, SweepOutcome, SweepPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    Speed,
    Kappa,
    Stable,
    Sinai,
    DualCheck,
    Identities,
    Sweep,
    EnvDump,
}

/// Runs `cmd` on a pool of `config.workers` threads.
pub fn run_command(cmd: Command, config: &RunConfig) -> CliResult<ExperimentReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match cmd {
        Command::Classify => cmd_classify(config),
        Command::Speed => cmd_speed(config),
        Command::Kappa => cmd_kappa(config),
        Command::Stable => cmd_stable(config),
        Command::Sinai => cmd_sinai(config),
        Command::DualCheck => cmd_dual_check(config),
        Command::Identities => cmd_identities(config),
        Command::Sweep => cmd_sweep(config),
        Command::EnvDump => cmd_env_dump(config),
    })
}

/// Independent master seed for sub-experiment `k` of a command.
pub(crate) fn sub_seed(config: &RunConfig, k: u32) -> u64 {
    rwsre::seed::derive(config.master_seed, rwsre::seed::Stream::Aux(k), 0)
}
