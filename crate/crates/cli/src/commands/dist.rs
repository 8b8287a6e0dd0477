//! `cvar dist`: risk measures of a distribution file.

use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use cvar_core::risk::DiscreteDistribution;

use crate::usage;
use crate::util::g12;

#[derive(Debug, Args)]
pub struct DistArgs {
    /// JSON file: an array of {"value": x, "prob": p} atoms.
    #[arg(long)]
    pub file: PathBuf,
    /// Risk level in (0, 1].
    #[arg(long)]
    pub alpha: f64,
    /// Print the VaR instead of the CVaR.
    #[arg(long)]
    pub var: bool,
}

pub fn run(args: &DistArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.file)
        .with_context(|| format!("reading distribution file `{}`", args.file.display()))
        .map_err(usage)?;
    let dist: DiscreteDistribution = serde_json::from_str(&text)
        .with_context(|| format!("parsing distribution file `{}`", args.file.display()))
        .map_err(usage)?;
    let value = if args.var {
        dist.var(args.alpha)
    } else {
        dist.cvar(args.alpha)
    }
    .map_err(|e| usage(e.into()))?;
    println!("{}", g12(value));
    Ok(())
}
