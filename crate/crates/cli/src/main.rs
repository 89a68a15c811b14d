//! `statesynth`: seeded experiment runner.
//!
//! Exit codes: 0 on success, 2 for usage errors (bad flags, invalid or over-cap parameters,
//! unreadable inputs) and 1 for anything that fails during the run itself.

mod args;
mod experiments;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;

use args::Cli;
use experiments::UsageError;

/// Environment variable that fixes the worker count.
const THREADS_VAR: &str = "STATESYNTH_THREADS";

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting the worker pool")?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    let name = cli.command.name();
    let config = serde_json::to_value(&cli.command).context("serializing the configuration")?;
    let start = Instant::now();
    let record = experiments::run(&cli.command, cli.seed, cli.trials)?;
    let seconds = start.elapsed().as_secs_f64();
    let doc = report::summary_document(name, cli.seed, cli.trials, &config, &record, seconds);
    if let Some(dir) = &cli.out {
        report::write_outputs(dir, name, &record, &doc)?;
    }
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

/// Rejected parameters from the library count as usage errors.
fn is_usage(err: &anyhow::Error) -> bool {
    use statesynth::Error as E;
    err.chain().any(|cause| {
        cause.is::<UsageError>()
            || matches!(
                cause.downcast_ref::<E>(),
                Some(
                    E::InvalidParameter(_)
                        | E::CapExceeded { .. }
                        | E::NotPowerOfTwo(_)
                        | E::Parse { .. }
                        | E::BoundNotApplicable(_)
                )
            )
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if is_usage(&err) { 2 } else { 1 })
        }
    }
}
