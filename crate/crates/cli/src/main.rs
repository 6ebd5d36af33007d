//! `hovqe` command-line driver: one TOML config per reproducible run.

mod commands;
mod config;
mod error;
mod format;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{Ctx, Output};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "hovqe", version, about = "Harmonic-oscillator Hamiltonians, qubit encodings and VQE runs")]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the seed from the config.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,
    /// Directory for CSV/JSON outputs; nothing is written when omitted.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Print energies with 17 significant digits.
    #[arg(long, global = true)]
    full_precision: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Lowest eigenvalue over a grid of basis sizes and truncation orders.
    Eigensolve,
    /// Encoded Pauli Hamiltonian as a listing and JSON.
    Encode,
    /// Counting formulas checked against enumeration.
    Counts,
    /// Commuting groups with their measurement circuits.
    Groups,
    /// Variational runs for one or more seeds.
    Vqe,
    /// Code, flip-string and operator tables.
    Tables,
}

fn execute(cli: &Cli) -> CliResult<Output> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = Ctx { full_precision: cli.full_precision, seed: cli.seed };
    match cli.command {
        Command::Eigensolve => commands::eigensolve(&cfg, ctx),
        Command::Encode => commands::encode_cmd(&cfg, ctx),
        Command::Counts => commands::counts(&cfg, ctx),
        Command::Groups => commands::groups(&cfg, ctx),
        Command::Vqe => commands::vqe(&cfg, ctx),
        Command::Tables => commands::tables(&cfg, ctx),
    }
}

fn write_files(dir: &Path, files: &[(String, String)]) -> CliResult<()> {
    let io = |p: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    for (name, contents) in files {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| io(&path, e))?;
    }
    Ok(())
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("hovqe: {e}");
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match execute(&cli) {
        Ok(out) => out,
        Err(e) => return fail(&e),
    };
    if let Some(dir) = &cli.out {
        if let Err(e) = write_files(dir, &out.files) {
            return fail(&e);
        }
    }
    print!("{}", out.stdout);
    match &out.failure {
        Some(e) => fail(e),
        None => ExitCode::SUCCESS,
    }
}
