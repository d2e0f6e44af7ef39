use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rwsre_cli::output::write_report;
use rwsre_cli::{run_command, CliError, Command, RunConfig};

/// Experiments on random walks in sparse random environments.
#[derive(Debug, Parser)]
#[command(name = "rwsre", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Directory for the JSON, CSV and TSV outputs.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    horizon: Option<u64>,
}

fn run(args: Args) -> Result<i32, CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(o) = args.out {
        cfg.out = Some(o);
    }
    if let Some(r) = args.replicas {
        cfg.run.replicas = r;
    }
    if let Some(h) = args.horizon {
        cfg.run.horizon = h;
    }
    let report = run_command(args.command, &cfg)?;
    for v in &report.verdicts {
        let tag = match (v.passed, v.hard) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "WARN",
        };
        eprintln!("{tag} {}: {}", v.name, v.detail);
    }
    match &cfg.out {
        Some(dir) => write_report(&report, dir)?,
        None => println!("{}", serde_json::to_string_pretty(&report).map_err(|e| CliError::Output(e.to_string()))?),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
