//! `splitbuf`: solve, sweep, optimize, simulate and validate the two-class
//! threshold-partitioned buffer from the command line.

mod commands;
mod config;
mod error;
mod output;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentSpec, RawConfig};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "splitbuf", version, about = "Two-class partitioned priority buffer: analysis and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Metrics (and gamma, if costs are given) for one threshold.
    Solve(Common),
    /// Metrics for every threshold in r_values.
    Sweep(Common),
    /// Cost sweep and the cost-minimizing threshold.
    Optimize(Common),
    /// Discrete-event simulation of one configuration.
    Simulate(Common),
    /// Analytic versus simulated metrics with z-scores.
    Validate(Common),
    /// Regenerate a canned curve set (fig3..fig12 or all).
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment file of `key = value` lines.
    #[arg(long)]
    config: PathBuf,
    /// Generator mode: literal, strict or both.
    #[arg(long)]
    mode: Option<String>,
    /// Simulation discipline: nonpreemptive, preemptive or independent.
    #[arg(long)]
    discipline: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    warmup: Option<f64>,
}

impl Common {
    fn spec(&self) -> Result<ExperimentSpec> {
        let mut raw = RawConfig::load(&self.config)?;
        if let Some(v) = &self.mode {
            raw.set("mode", v);
        }
        if let Some(v) = &self.discipline {
            raw.set("discipline", v);
        }
        if let Some(v) = self.seed {
            raw.set("seed", v);
        }
        if let Some(v) = self.replications {
            raw.set("replications", v);
        }
        if let Some(v) = self.horizon {
            raw.set("horizon", v);
        }
        if let Some(v) = self.warmup {
            raw.set("warmup", v);
        }
        ExperimentSpec::from_raw(&raw)
    }
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    /// Figure id: fig3 .. fig12, or all.
    figure: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(c) => commands::solve(&c.spec()?, c.out.as_deref())?,
        Command::Sweep(c) => commands::sweep(&c.spec()?, c.out.as_deref())?,
        Command::Optimize(c) => commands::optimize(&c.spec()?, c.out.as_deref())?,
        Command::Simulate(c) => commands::simulate(&c.spec()?, c.out.as_deref())?,
        Command::Validate(c) => {
            if !commands::validate_cmd(&c.spec()?, c.out.as_deref())? {
                eprintln!("validation failed: a matched pair disagrees beyond 3 standard errors");
                return Ok(ExitCode::from(1));
            }
        }
        Command::Reproduce(r) => {
            reproduce::reproduce(&r.figure, &r.out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("splitbuf: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
