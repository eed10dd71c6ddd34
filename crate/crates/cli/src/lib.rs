//! Batch front end for the micromaser toolkit.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::Context;
use config::RunConfig;
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "micromaser",
    version,
    about = "Level diagrams, adiabaticity maps and photon statistics of a circuit micromaser"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps; defaults to the machine's parallelism.
    #[arg(long, global = true, env = "MICROMASER_WORKERS")]
    pub workers: Option<usize>,
    /// Phase grid override, e.g. `80x160`.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    /// Seed for eigensolver start vectors (overrides `sweep.seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Levels and transition matrix elements versus f.
    Fig2,
    /// Adiabaticity figures K01 and K12 versus f.
    Fig3,
    /// Steady-state photon statistics for each pump setting.
    Fig4,
    /// Master-equation trajectory.
    Evolve,
    /// Laboratory-unit device parameters.
    EstimateDevice,
    /// Energy levels versus f.
    Sweep {
        /// Memoize sweeps in this directory.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (p, q) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NPxNQ, got `{s}`"))?;
    let p = p.trim().parse().map_err(|e| format!("bad n_p in `{s}`: {e}"))?;
    let q = q.trim().parse().map_err(|e| format!("bad n_q in `{s}`: {e}"))?;
    Ok((p, q))
}

/// Loads the configuration and applies command-line overrides.
pub fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if let Some((n_p, n_q)) = cli.grid {
        cfg.circuit.n_p = n_p;
        cfg.circuit.n_q = n_q;
    }
    if let Some(seed) = cli.seed {
        cfg.sweep.seed = seed;
    }
    Ok(cfg)
}

/// What a run produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Text meant for standard output.
    pub report: String,
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let ctx = Context::new(resolve_config(cli)?)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Validation("--workers must be >= 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Io(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Fig2 => commands::cmd_fig2(&ctx).map(files_only),
        Command::Fig3 => commands::cmd_fig3(&ctx).map(files_only),
        Command::Fig4 => commands::cmd_fig4(&ctx).map(files_only),
        Command::Evolve => commands::cmd_evolve(&ctx).map(files_only),
        Command::EstimateDevice => commands::cmd_estimate_device(&ctx).map(|(files, report)| Outcome { files, report }),
        Command::Sweep { cache } => commands::cmd_sweep(&ctx, cache.as_deref()).map(files_only),
    })
}

fn files_only(files: Vec<PathBuf>) -> Outcome {
    Outcome {
        files,
        report: String::new(),
    }
}
