//! `cvar solve`: run a planner and emit its tables.

use std::path::PathBuf;

use anyhow::anyhow;
use clap::Args;
use cvar_core::dp::{
    risk_neutral_dp, solve_fcvar, solve_ncvar, solve_pcvar, CvarSolution, Method,
};
use cvar_core::mdp::FiniteHorizonMdp;
use cvar_core::risk::AlphaGrid;
use cvar_core::rollout::run_batch;

use crate::env_build::build_env;
use crate::usage;
use crate::util::{g12, resolve_out_dir, to_json_string, write_manifest, write_output, Versioned};

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// One of pcvar, ncvar, fcvar, neutral, worstcase.
    #[arg(long)]
    pub method: String,
    /// Builder name (tree_a, tree_b, gridworld) or MDP JSON path.
    #[arg(long)]
    pub env: String,
    /// Risk level: the start preference for pcvar, the fixed preference for
    /// ncvar/fcvar. Ignored by the baselines.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// Lowest point of the risk grid.
    #[arg(long, default_value_t = cvar_core::risk::DEFAULT_GRID_MIN)]
    pub grid_min: f64,
    /// Number of log-spaced grid points.
    #[arg(long, default_value_t = cvar_core::risk::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Also emit a per-state policy sweep across the risk grid for all three
    /// CVaR methods (simulation-based; needs --seed).
    #[arg(long)]
    pub sweep: bool,
    /// Episodes per sweep point.
    #[arg(long, default_value_t = 2000)]
    pub sweep_episodes: u64,
    /// Seed for the sweep simulations.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overwrite existing outputs.
    #[arg(long)]
    pub force: bool,
}

pub fn solve_one(
    mdp: &FiniteHorizonMdp,
    method: Method,
    alpha: Option<f64>,
    grid: &AlphaGrid,
) -> anyhow::Result<CvarSolution> {
    let need_alpha = || {
        alpha.ok_or_else(|| usage(anyhow!("--alpha is required for {}", method.name())))
    };
    let sol = match method {
        Method::Pcvar => solve_pcvar(mdp, grid)?,
        Method::Ncvar => solve_ncvar(mdp, need_alpha()?)?,
        Method::Fcvar => solve_fcvar(mdp, need_alpha()?, grid)?,
        Method::Neutral => risk_neutral_dp(mdp)?,
        Method::Worstcase => cvar_core::dp::worst_case_dp(mdp)?,
    };
    Ok(sol)
}

pub fn run(args: &SolveArgs) -> anyhow::Result<()> {
    let method: Method = args.method.parse().map_err(|e: cvar_core::Error| usage(e.into()))?;
    let (mdp, _kind) = build_env(&args.env, args.rows, args.cols).map_err(usage)?;
    let grid = AlphaGrid::log_spaced(args.grid_min, args.grid_points)
        .map_err(|e| usage(e.into()))?;
    let out_dir = resolve_out_dir(&args.out).map_err(usage)?;
    if args.sweep && args.seed.is_none() {
        return Err(usage(anyhow!("--sweep runs simulations and requires --seed")));
    }

    let solution = solve_one(&mdp, method, args.alpha, &grid)?;

    let json = to_json_string(&Versioned::new(&solution))?;
    write_output(&out_dir, "solution.json", &json, args.force)?;
    write_output(&out_dir, "policy.csv", &policy_csv(&solution), args.force)?;

    if args.sweep {
        let csv = sweep_csv(&mdp, &grid, args.sweep_episodes, args.seed.unwrap())?;
        write_output(&out_dir, "sweep.csv", &csv, args.force)?;
    }

    write_manifest(
        &out_dir,
        args.seed,
        serde_json::json!({
            "command": "solve",
            "method": method.name(),
            "env": args.env,
            "alpha": args.alpha,
            "rows": args.rows,
            "cols": args.cols,
            "grid_min": args.grid_min,
            "grid_points": args.grid_points,
            "sweep": args.sweep,
            "sweep_episodes": args.sweep_episodes,
        }),
        args.force,
    )?;
    println!(
        "solved {} on {} -> {}",
        method.name(),
        args.env,
        out_dir.display()
    );
    Ok(())
}

/// Long-format table: one row per (t, state, risk level).
fn policy_csv(sol: &CvarSolution) -> String {
    let mut out = String::from("t,state,alpha,action,value\n");
    let horizon = sol.horizon();
    for t in 0..horizon {
        for (s, id) in sol.state_ids.iter().enumerate() {
            let slots = sol.values[t][s].len();
            for k in 0..slots {
                let alpha = match (&sol.grid, sol.method) {
                    (Some(grid), _) => grid.points()[k],
                    (None, Method::Ncvar) => sol.alpha_bar.unwrap_or(f64::NAN),
                    (None, Method::Neutral) => 1.0,
                    (None, _) => 0.0,
                };
                let action = if sol.policy[t][s].len() == 1 {
                    sol.policy[t][s][0]
                } else {
                    sol.policy[t][s][k]
                };
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    t,
                    id,
                    g12(alpha),
                    action,
                    g12(sol.values[t][s][k])
                ));
            }
        }
    }
    out
}

/// Simulation-backed policy sweep across the grid for the three CVaR
/// methods: visited states report the modal simulated action, unvisited
/// states the policy of an agent starting there.
pub fn sweep_csv(
    mdp: &FiniteHorizonMdp,
    grid: &AlphaGrid,
    episodes: u64,
    seed: u64,
) -> anyhow::Result<String> {
    let mut out = String::from("state,method,alpha,action\n");
    let pcvar = solve_pcvar(mdp, grid)?;
    for (pos, &alpha) in grid.points().iter().enumerate() {
        for method in [Method::Pcvar, Method::Fcvar, Method::Ncvar] {
            let solution = match method {
                Method::Pcvar => pcvar.clone(),
                Method::Fcvar => solve_fcvar(mdp, alpha, grid)?,
                Method::Ncvar => solve_ncvar(mdp, alpha)?,
                _ => unreachable!(),
            };
            let actions = sweep_actions(mdp, &solution, method, alpha, episodes, seed ^ pos as u64)?;
            for (id, action) in actions {
                out.push_str(&format!("{},{},{},{}\n", id, method.name(), g12(alpha), action));
            }
        }
    }
    Ok(out)
}

/// Per-state action at one (method, alpha) sweep point.
pub fn sweep_actions(
    mdp: &FiniteHorizonMdp,
    solution: &CvarSolution,
    method: Method,
    alpha: f64,
    episodes: u64,
    seed: u64,
) -> anyhow::Result<Vec<(String, usize)>> {
    let summary = run_batch(mdp, solution, method, alpha, episodes, seed)?;
    let mut out = Vec::new();
    for (s, state) in mdp.states.iter().enumerate() {
        if state.terminal {
            continue;
        }
        let action = match summary.stats_for(&state.id) {
            Some(stats) => stats.modal_action,
            None => solution.action_at(0, s, alpha),
        };
        out.push((state.id.clone(), action));
    }
    Ok(out)
}
