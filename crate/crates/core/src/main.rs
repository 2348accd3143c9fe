use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use uavjam::cli::{self, RunFlags};

#[derive(Parser)]
#[command(
    name = "uavjam",
    version,
    about = "Anti-jamming layout and beam optimisation for UAV swarms"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its outputs.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Replace the antenna pattern with 0 dBi omnidirectional antennas.
        #[arg(long)]
        omni: bool,
        /// Wall-clock limit for the optimiser, in seconds.
        #[arg(long = "time-budget", value_name = "S")]
        time_budget: Option<f64>,
        #[arg(long, env = "UAVJAM_OUT", default_value = "uavjam-out")]
        out: PathBuf,
        /// Evaluate the population on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Compare two run directories (OF ratio A/B, data rates, per-generation deltas).
    Compare { dir_a: PathBuf, dir_b: PathBuf },
    /// Parse and validate a config, then print it with defaults filled in.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Args::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> uavjam::Result<()> {
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let mut out = io::stdout().lock();
    match command {
        Command::Run {
            config,
            seed,
            omni,
            time_budget,
            out: dir,
            sequential,
        } => {
            let parsed = cli::parse_config(&config)?;
            let flags = RunFlags {
                seed,
                omni,
                time_budget_s: time_budget,
                sequential,
            };
            let summary = cli::run(&parsed, &config, &dir, &flags)?;
            let _ = writeln!(out, "{summary}\noutputs in {}", dir.display());
        }
        Command::Compare { dir_a, dir_b } => {
            let _ = write!(out, "{}", cli::compare(&dir_a, &dir_b)?);
        }
        Command::Validate { config } => {
            let parsed = cli::parse_config(&config)?;
            let _ = writeln!(out, "{}", cli::config_to_json(&parsed));
        }
    }
    Ok(())
}
