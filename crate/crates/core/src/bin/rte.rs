use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slab_transport::cli::{self, CliError, RunConfig};

/// Even-parity slab transport solver.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem; writes solution.csv, iterations.csv, summary.txt.
    Solve(Common),
    /// Manufactured-solution refinement study; writes convergence.csv.
    Convergence(Common),
    /// Error-propagation spectra; writes spectrum.csv.
    Spectrum(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<String, CliError> {
    cli::configure_threads()?;
    let (common, cmd): (&Common, fn(&RunConfig, &std::path::Path) -> _) = match &cli.command {
        Command::Solve(c) => (c, cli::cmd_solve),
        Command::Convergence(c) => (c, cli::cmd_convergence),
        Command::Spectrum(c) => (c, cli::cmd_spectrum),
    };
    let cfg = RunConfig::from_file(&common.config)?;
    let out = common.out.clone().unwrap_or_else(|| cfg.output.clone());
    let outcome = cmd(&cfg, &out)?;
    let mut text = outcome.summary;
    for f in &outcome.files {
        text.push_str(&format!("wrote {}\n", f.display()));
    }
    Ok(text)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rte: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
