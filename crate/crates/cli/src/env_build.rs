//! Environment resolution: builder names or MDP JSON files.

use std::path::Path;

use anyhow::Context;
use cvar_core::mdp::{
    build_gridworld, build_two_stage_tree, FiniteHorizonMdp, GridworldSpec, MdpJson, TreeVariant,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    TreeA,
    TreeB,
    Gridworld,
    File,
}

/// Accepts `tree_a`, `tree_b`, `gridworld` (with optional row/col overrides),
/// or a path to an MDP JSON file.
pub fn build_env(
    env: &str,
    rows: Option<usize>,
    cols: Option<usize>,
) -> anyhow::Result<(FiniteHorizonMdp, EnvKind)> {
    match env {
        "tree_a" => Ok((build_two_stage_tree(TreeVariant::A), EnvKind::TreeA)),
        "tree_b" => Ok((build_two_stage_tree(TreeVariant::B), EnvKind::TreeB)),
        "gridworld" => {
            let mut spec = GridworldSpec::default();
            if let Some(r) = rows {
                spec.rows = r;
            }
            if let Some(c) = cols {
                spec.cols = c;
            }
            spec.horizon = spec.rows + spec.cols + 2;
            Ok((build_gridworld(&spec)?, EnvKind::Gridworld))
        }
        path => {
            let file = Path::new(path);
            let text = std::fs::read_to_string(file)
                .with_context(|| format!("reading MDP file `{path}`"))?;
            let json: MdpJson = serde_json::from_str(&text)
                .with_context(|| format!("parsing MDP file `{path}`"))?;
            Ok((FiniteHorizonMdp::from_json(&json)?, EnvKind::File))
        }
    }
}
