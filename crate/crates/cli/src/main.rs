//! qturb: drives the encode -> estimate -> assemble -> report pipeline from
//! the command line. Each subcommand owns a config that --config can supply
//! from a JSON file; explicit flags win over the file, and the resolved
//! config is embedded in every output so a run reproduces byte for byte.
//!
//! Exit codes: 0 success, 1 I/O trouble, 2 bad configuration, 3 training
//! failure, 4 solver blow-up.

mod commands;
mod common;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::burgers::BurgersArgs;
use commands::dea::DeaArgs;
use commands::metrics::MetricsArgs;
use commands::oracle::OracleArgs;
use commands::sine::SineArgs;
use common::{out_dir, BaselineArg, CliError, Globals, Mode};

#[derive(Parser)]
#[command(name = "qturb", version, about = "Quantum readout of fluid statistics, simulated")]
struct Cli {
    /// Output directory; defaults to $QTURB_OUT, then ./out.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Base RNG seed (training starts, shot streams, angle sweeps).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON settings file for the subcommand; explicit flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// exact skips the sampled readout sections; shots produces them.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Measurement shots per observable.
    #[arg(long, global = true)]
    shots: Option<usize>,
    /// What the sampled estimates are scored against in the N-sigma column.
    #[arg(long, global = true, value_enum)]
    baseline: Option<BaselineArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on the shifted sine signal and read its statistics back out.
    Sine(SineArgs),
    /// Run the forced viscous solver and read out each stored snapshot.
    Burgers(BurgersArgs),
    /// Sweep ansatz expressivity (Jacobian rank) against depth.
    Dea(DeaArgs),
    /// Two-qubit cost table for the measurement circuits.
    Metrics(MetricsArgs),
    /// Classical-only statistics for a stored field file.
    Oracle(OracleArgs),
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let globals = Globals {
        out: out_dir(&cli.out)?,
        config: cli.config.clone(),
        seed: cli.seed,
        mode: cli.mode,
        shots: cli.shots,
        baseline: cli.baseline.map(Into::into),
    };
    match &cli.command {
        Command::Sine(args) => commands::sine::run(&globals, args),
        Command::Burgers(args) => commands::burgers::run(&globals, args),
        Command::Dea(args) => commands::dea::run(&globals, args),
        Command::Metrics(args) => commands::metrics::run(&globals, args),
        Command::Oracle(args) => commands::oracle::run(&globals, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            use std::io::Write;
            let _ = writeln!(std::io::stderr(), "error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
