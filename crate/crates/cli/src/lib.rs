//! Batch front-end for the `transhyp` engine: reads a JSON run config,
//! builds the graph or family it describes, runs one subcommand and writes
//! CSV/JSON artifacts.
//!
//! Exit status: 0 when every assertion passed, 1 on an assertion failure,
//! 2 for an unreadable or malformed config (or a bad command line), 3 for a
//! domain or parameter error raised by the engine.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "transhyp", version, about = "Curvature checks for translation hypersurfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overrides the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate S_r on a grid and write points CSV + report JSON.
    Scan(CommonArgs),
    /// Build and validate a family, print its derived constants.
    Family(CommonArgs),
    /// Integrate the log-cos ODE and compare with the closed form.
    Ode(CommonArgs),
    /// Check the W^{r+2} and G_r derivative identities.
    Identities(CommonArgs),
    /// Newton, Maclaurin and zero-propagation checks on a value list.
    Sym(CommonArgs),
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Scan(a) | Command::Family(a) | Command::Ode(a) | Command::Identities(a) | Command::Sym(a) => a,
        }
    }
}

/// Runs the command; `Ok(false)` means an assertion failed.
pub fn run(cli: &Cli) -> CliResult<bool> {
    let args = cli.command.args();
    let cfg = config::load(&args.config)?;
    let ctx = commands::RunContext {
        out_dir: &args.out_dir,
        seed: args.seed.or(cfg.config.seed).unwrap_or(0),
    };
    match &cli.command {
        Command::Scan(_) => commands::scan(&cfg, &ctx),
        Command::Family(_) => commands::family(&cfg, &ctx),
        Command::Ode(_) => commands::ode(&cfg, &ctx),
        Command::Identities(_) => commands::identities(&cfg, &ctx),
        Command::Sym(_) => commands::sym(&cfg, &ctx),
    }
}
