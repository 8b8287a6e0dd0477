//! `cvar simulate`: batch rollouts of a solved policy.

use std::path::PathBuf;

use clap::Args;
use cvar_core::dp::Method;
use cvar_core::mdp::GridworldSpec;
use cvar_core::risk::AlphaGrid;
use cvar_core::rollout::{run_batch_with_returns, RolloutSummary};

use super::solve::solve_one;
use crate::env_build::{build_env, EnvKind};
use crate::usage;
use crate::util::{g12, resolve_out_dir, to_json_string, write_manifest, write_output, Versioned};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub method: String,
    #[arg(long)]
    pub env: String,
    /// Start (pcvar) or fixed (ncvar/fcvar) risk preference.
    #[arg(long)]
    pub alpha0: f64,
    #[arg(long, default_value_t = 20_000)]
    pub episodes: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long, default_value_t = cvar_core::risk::DEFAULT_GRID_MIN)]
    pub grid_min: f64,
    #[arg(long, default_value_t = cvar_core::risk::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Also emit a per-cell action grid (gridworld only).
    #[arg(long)]
    pub policy_map: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

pub fn run(args: &SimulateArgs) -> anyhow::Result<()> {
    let method: Method = args.method.parse().map_err(|e: cvar_core::Error| usage(e.into()))?;
    let (mdp, kind) = build_env(&args.env, args.rows, args.cols).map_err(usage)?;
    let grid = AlphaGrid::log_spaced(args.grid_min, args.grid_points)
        .map_err(|e| usage(e.into()))?;
    let out_dir = resolve_out_dir(&args.out).map_err(usage)?;
    if args.policy_map && kind != EnvKind::Gridworld {
        return Err(usage(anyhow::anyhow!("--policy-map is only available for gridworld")));
    }

    let solution = solve_one(&mdp, method, Some(args.alpha0), &grid)?;
    let (summary, returns) = run_batch_with_returns(
        &mdp,
        &solution,
        method,
        args.alpha0,
        args.episodes,
        args.seed,
    )?;

    write_output(
        &out_dir,
        "summary.json",
        &to_json_string(&Versioned::new(&summary))?,
        args.force,
    )?;

    let mut returns_csv = String::from("episode,return\n");
    for (i, r) in returns.iter().enumerate() {
        returns_csv.push_str(&format!("{},{}\n", i, g12(*r)));
    }
    write_output(&out_dir, "returns.csv", &returns_csv, args.force)?;

    if args.policy_map {
        let rows = args.rows.unwrap_or(3);
        let cols = args.cols.unwrap_or(5);
        let csv = policy_map_csv(rows, cols, &summary, &solution, args.alpha0);
        write_output(&out_dir, "policy_map.csv", &csv, args.force)?;
    }

    write_manifest(
        &out_dir,
        Some(args.seed),
        serde_json::json!({
            "command": "simulate",
            "method": method.name(),
            "env": args.env,
            "alpha0": args.alpha0,
            "episodes": args.episodes,
            "rows": args.rows,
            "cols": args.cols,
            "grid_min": args.grid_min,
            "grid_points": args.grid_points,
            "policy_map": args.policy_map,
        }),
        args.force,
    )?;
    println!(
        "simulated {} episodes of {} on {} -> {}",
        args.episodes,
        method.name(),
        args.env,
        out_dir.display()
    );
    Ok(())
}

/// Per-cell modal action: visited cells from the batch, unvisited cells from
/// the policy of an agent starting there.
fn policy_map_csv(
    rows: usize,
    cols: usize,
    summary: &RolloutSummary,
    solution: &cvar_core::dp::CvarSolution,
    alpha0: f64,
) -> String {
    let mut out = String::from("row,col,action,action_name,visits,unique\n");
    for r in 1..=rows {
        for c in 1..=cols {
            let id = GridworldSpec::cell_id(r, c);
            let state_idx = solution
                .state_ids
                .iter()
                .position(|s| *s == id)
                .expect("cell id in solution");
            let (action, visits, unique) = match summary.stats_for(&id) {
                Some(stats) => (stats.modal_action, stats.visits, stats.unique_action),
                None => (solution.action_at(0, state_idx, alpha0), 0, true),
            };
            let name = if action == 0 { "left" } else { "right" };
            out.push_str(&format!("{r},{c},{action},{name},{visits},{unique}\n"));
        }
    }
    out
}
