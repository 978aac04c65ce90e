use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use wavescat::config::parse_config;
use wavescat::runner::{run_command, Command};
use wavescat::Error;

/// Waveguide scattering matrices from a finite-rank effective Hamiltonian,
/// with truncation convergence studies and unitarity diagnostics.
#[derive(Parser)]
#[command(name = "wavescat", version)]
struct Args {
    /// Path to a line-oriented `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Command to run: smatrix, sweep, converge-n, converge-lambda,
    /// unitarity, or compare-formulas.
    #[arg(long)]
    command: String,

    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Recorded in the output header; reserved for synthetic fixtures.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: &Args) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Io(format!("{}: {e}", args.config.display())))?;
    let config = parse_config(&text)?;
    let command: Command = args.command.parse()?;
    let csv = run_command(command, &config, args.seed)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
