//! `tunnelwell`: run double-well tunneling calculations from a JSON config
//! and write CSV tables.

mod commands;
mod config;
mod error;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::commands::Context;
use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "tunnelwell",
    version,
    about = "Tunneling amplitudes of asymmetric double wells"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stationary points, frequencies and localized levels.
    Characterize(Args),
    /// Semiclassical tunneling amplitude and its ingredients.
    Amplitude(Args),
    /// Amplitude over a range of the asymmetry, one table per barrier scale.
    Sweep(Args),
    /// Finite-difference splitting against the semiclassical Rabi gap.
    ExactCompare(Args),
    /// Survival probability under a piecewise-constant amplitude.
    Zeno(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output path prefix; overrides `output.prefix`.
    #[arg(long)]
    out: Option<String>,
    /// Write a gnuplot script next to each CSV.
    #[arg(long)]
    plot: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tunnelwell: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    let (name, args, f): (&'static str, &Args, CommandFn) = match &command {
        Command::Characterize(a) => ("characterize", a, commands::characterize),
        Command::Amplitude(a) => ("amplitude", a, commands::amplitude),
        Command::Sweep(a) => ("sweep", a, commands::sweep),
        Command::ExactCompare(a) => ("exact-compare", a, commands::exact_compare),
        Command::Zeno(a) => ("zeno", a, commands::zeno),
    };
    let raw =
        fs::read(&args.config).map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let text = String::from_utf8(raw.clone())
        .map_err(|_| CliError::Config(format!("{} is not UTF-8", args.config.display())))?;
    let cfg = RunConfig::parse(&text)?;
    let ctx = Context {
        command: name,
        config_hash: hex(&Sha256::digest(&raw)),
    };
    let tables = f(&cfg, &ctx)?;
    let prefix = args.out.clone().or_else(|| cfg.output.prefix.clone());
    let plot = args.plot || cfg.output.emit_plot_script;
    for path in output::emit(&tables, prefix.as_deref(), plot)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

type CommandFn = fn(&RunConfig, &Context) -> Result<Vec<output::Table>, CliError>;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
