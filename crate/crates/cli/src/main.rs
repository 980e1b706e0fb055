use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use morsekit_cli::{configure_threads, run, Command, Invocation};

/// Simulate and fit magneto-optical resonance spectra.
#[derive(Parser)]
#[command(name = "morsekit", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: output.dir from the config, else the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the noise / restart seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a cw spectrum.
    Simulate(Common),
    /// Fit the spin-state model to a trace.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Trace CSV with header `frequency_hz,value`.
        #[arg(long)]
        trace: PathBuf,
    },
    /// Simulate a pulsed-sequence spectrum.
    Pulsed(Common),
    /// Print broadening and resolution estimates.
    Estimate(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(std::env::var("MORSEKIT_THREADS").ok().as_deref()) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    let (command, common, trace) = match cli.command {
        Cmd::Simulate(c) => (Command::Simulate, c, None),
        Cmd::Fit { common, trace } => (Command::Fit, common, Some(trace)),
        Cmd::Pulsed(c) => (Command::Pulsed, c, None),
        Cmd::Estimate(c) => (Command::Estimate, c, None),
    };
    let invocation = Invocation {
        command,
        config: common.config,
        trace,
        out: common.out,
        seed: common.seed,
    };
    match run(&invocation) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
