//! `aclbeam`: simulate and analyse boundary-controlled piezoelectric
//! sandwich beams from the command line.
//!
//! Subcommands: `simulate` (closed-loop run with energy ledger),
//! `spectrum` (closed-loop eigenvalues and boundary traces), `compare`
//! (charge vs voltage modal frequencies), `sweep` (gain grid with
//! abscissa and fitted decay rate per point). All commands write CSV
//! data plus a JSON run manifest; exit code 0 on success, 2 on config or
//! usage errors, 3 on numerical failures.

mod commands;
mod grid;
mod manifest;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "aclbeam", version, about = "Sandwich-beam simulation and spectral analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Beam config file (TOML); the built-in reference beam when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parse the config as (and assemble) a multilayer stack.
    #[arg(long)]
    multilayer: bool,
    /// Number of mesh elements.
    #[arg(long, default_value_t = 40)]
    n: usize,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Also dump M, K, D as dense CSV into this directory.
    #[arg(long, value_name = "DIR")]
    dump_operators: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Time step.
    #[arg(long, default_value_t = 1e-2)]
    dt: f64,
    /// Simulation horizon.
    #[arg(long = "T", default_value_t = 20.0)]
    horizon: f64,
    /// Initial profile: bending-bump, axial-kick, or mixed.
    #[arg(long, default_value = "mixed")]
    profile: String,
    /// Write a state snapshot every this many steps (0 = none).
    #[arg(long, default_value_t = 0)]
    snapshots: usize,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of lowest modes to report.
    #[arg(long, default_value_t = 24)]
    modes: usize,
}

#[derive(Args)]
struct CompareArgs {
    /// Beam config file (TOML); the built-in reference beam when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of mesh elements.
    #[arg(long, default_value_t = 80)]
    n: usize,
    /// Number of lowest modes to compare.
    #[arg(long, default_value_t = 36)]
    modes: usize,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Beam config file (TOML); the built-in reference beam when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of mesh elements.
    #[arg(long, default_value_t = 40)]
    n: usize,
    /// Number of lowest modes for the abscissa.
    #[arg(long, default_value_t = 24)]
    modes: usize,
    /// Time step of the per-point decay run.
    #[arg(long, default_value_t = 1e-2)]
    dt: f64,
    /// Horizon of the per-point decay run.
    #[arg(long = "T", default_value_t = 20.0)]
    horizon: f64,
    /// Initial profile for the decay runs.
    #[arg(long, default_value = "mixed")]
    profile: String,
    /// Gain axis like `s1=0:0.25:2` or `k2=0.5`; repeat for a grid.
    #[arg(long)]
    grid: Vec<String>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run the closed loop and write the energy/dissipation ledger.
    Simulate(SimulateArgs),
    /// Compute the closed-loop spectrum and boundary traces.
    Spectrum(SpectrumArgs),
    /// Compare charge- and voltage-actuated modal frequencies.
    Compare(CompareArgs),
    /// Sweep feedback gains; one row of abscissa + decay rate per point.
    Sweep(SweepArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(&args),
        Command::Spectrum(args) => commands::spectrum(&args),
        Command::Compare(args) => commands::compare(&args),
        Command::Sweep(args) => commands::sweep(&args),
    };
    match result {
        Ok(()) => {}
        Err(failure) => {
            eprintln!("error: {failure}");
            std::process::exit(failure.exit_code());
        }
    }
}
