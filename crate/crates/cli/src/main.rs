//! Command-line interface for the CVaR toolkit.
//!
//! Exit codes: 0 on success, 1 on runtime/numeric failure, 2 on usage or
//! configuration errors (including malformed input files).

mod commands;
mod env_build;
mod trials_io;
mod util;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{dist, simulate, solve, twostep};

#[derive(Debug, Parser)]
#[command(
    name = "cvar",
    version,
    about = "CVaR risk measures, finite-horizon CVaR planners, and the two-step task model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// VaR/CVaR of a discrete distribution file.
    Dist(dist::DistArgs),
    /// Solve an environment with one of the planners.
    Solve(solve::SolveArgs),
    /// Monte Carlo rollouts of a solved policy.
    Simulate(simulate::SimulateArgs),
    /// Two-step task model commands.
    #[command(subcommand)]
    Twostep(twostep::TwostepCmd),
}

pub use util::{usage, UsageError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Dist(args) => dist::run(args),
        Command::Solve(args) => solve::run(args),
        Command::Simulate(args) => simulate::run(args),
        Command::Twostep(cmd) => twostep::run(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
