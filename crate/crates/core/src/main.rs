use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use magnomech::cli::{self, CliError, DEFAULT_PHASE_RESOLUTION};

#[derive(Parser)]
#[command(name = "magnomech", version, about = "Steady-state entanglement in cavity magnomechanics")]
struct Args {
    /// Worker threads for grid evaluation (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the mean field, stability and entanglement at the configured point.
    Steady {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate the configured sweep grid and write a CSV table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Find the phase difference that maximizes R_min.
    PhaseOpt {
        #[arg(long)]
        config: PathBuf,
        /// Coarse grid points over one period before refinement.
        #[arg(long, default_value_t = DEFAULT_PHASE_RESOLUTION)]
        resolution: usize,
    },
}

fn run(args: Args) -> Result<(), CliError> {
    let threads = args.threads;
    match args.command {
        Command::Steady { config } => {
            let text = cli::read_config(&config)?;
            print!("{}", cli::cmd_steady(&text)?);
        }
        Command::Sweep { config, out } => {
            let text = cli::read_config(&config)?;
            let rows = cli::cmd_sweep(&text, &out, threads)?;
            eprintln!("wrote {rows} rows to {}", out.display());
        }
        Command::PhaseOpt { config, resolution } => {
            let text = cli::read_config(&config)?;
            print!("{}", cli::with_threads(threads, || cli::cmd_phase_opt(&text, resolution))??);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
