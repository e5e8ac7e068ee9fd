//! `qpinem` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

mod commands;
mod config;
mod output;
mod state;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{experiment, hbt, reconstruct, spectrum, tomography};
use config::{Common, Format};

/// Free-electron spectra of quantum light, moment inversion, homodyne
/// tomography and coherence scans.
#[derive(Parser, Debug)]
#[command(name = "qpinem", version, about)]
pub struct Cli {
    /// Output directory (default: $QPINEM_OUT_DIR, else ./qpinem-out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// JSON configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also render SVG plots.
    #[arg(long, global = true)]
    svg: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Electron energy spectrum for a photonic state.
    Spectrum(spectrum::Args),
    /// Photon-number moments and statistics from a spectrum.
    Reconstruct(reconstruct::Args),
    /// LO phase sweep, quadrature distributions and Wigner reconstruction.
    Tomography(tomography::Args),
    /// Modified coherence functions of a delayed pair.
    Hbt(hbt::Args),
    /// Finite-electron precision, coupling jitter and single-shot budget.
    Experiment(experiment::Args),
}

fn run(cli: Cli) -> qpinem::Result<()> {
    let file = match &cli.config {
        Some(path) => config::load(path)?,
        None => serde_json::Value::Object(Default::default()),
    };
    let common = Common::resolve(&file, cli.out_dir, cli.format, cli.seed, cli.svg)?;
    match cli.command {
        Command::Spectrum(a) => spectrum::run(&common, &file, a),
        Command::Reconstruct(a) => reconstruct::run(&common, &file, a),
        Command::Tomography(a) => tomography::run(&common, &file, a),
        Command::Hbt(a) => hbt::run(&common, &file, a),
        Command::Experiment(a) => experiment::run(&common, &file, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
