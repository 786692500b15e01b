//! `drsplit`: run, sweep and analyze adaptive Douglas–Rachford and ADMM
//! experiments from a TOML configuration.
//!
//! Exit status: 0 on convergence (or success), 2 when a run hits its
//! iteration limit, 1 on any error.

mod analyze;
mod config;
mod gen;
mod output;
mod problem;
mod run;
mod selftest;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::analyze::Analysis;
use crate::config::RunConfig;
use crate::gen::GenArgs;

#[derive(Debug, Parser)]
#[command(name = "drsplit", version, about = "Adaptive Douglas-Rachford splitting experiments")]
struct Cli {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides output.dir.
    #[arg(long, global = true, env = "DRSPLIT_OUT")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and grid analyses; defaults to logical cores.
    #[arg(long, global = true, env = "DRSPLIT_THREADS")]
    threads: Option<usize>,
    /// Problem seed; overrides problem.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem and write trace.csv and summary.csv.
    Run,
    /// Solve a grid of problems, methods, stepsizes and seeds; write sweep.csv and table.csv.
    Sweep,
    /// Analyze the linear iteration.
    Analyze {
        #[command(subcommand)]
        what: Analysis,
    },
    /// Problem generation.
    Problems {
        #[command(subcommand)]
        what: ProblemsCommand,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Debug, Subcommand)]
enum ProblemsCommand {
    /// Write a generated instance as an archive or text matrices.
    Gen(GenArgs),
}

fn dispatch(cli: Cli) -> Result<u8> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.problem.seed = seed;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let out = cli.out.or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    match cli.command {
        Command::Run => run::run(&cfg, &out),
        Command::Sweep => sweep::sweep(&cfg, &out),
        Command::Analyze { what } => analyze::analyze(&cfg, what, &out),
        Command::Problems { what: ProblemsCommand::Gen(args) } => gen::generate(&cfg, &args, &out),
        Command::Selftest => selftest::selftest(),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
