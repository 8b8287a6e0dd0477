//! `cvar twostep`: model fitting, simulation, recovery, and the two
//! experiment protocols.

use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Subcommand};
use cvar_core::inference::{
    figure4_trace, fit, misattribution_experiment, recover, sample_generative_params,
    simulate_agent, Figure4Overrides, ModelKind, RewardSchedule,
};
use cvar_core::twostep::{TwoStepParams, PARAM_NAMES};

use crate::trials_io::{trials_from_csv, trials_to_csv};
use crate::usage;
use crate::util::{g12, resolve_out_dir, to_json_string, write_manifest, write_output, Versioned};

#[derive(Debug, Subcommand)]
pub enum TwostepCmd {
    /// Fit a model to trial data by maximum likelihood.
    Fit(FitArgs),
    /// Generate synthetic trials from the model.
    Simulate(SimArgs),
    /// Simulate-and-refit parameter recovery.
    Recover(RecoverArgs),
    /// Forced-choice switching protocol trace.
    Figure4(Figure4Args),
    /// Fit the mean model to risk-sensitive agents.
    Misattribution(MisattributionArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Trials CSV (`trial,choice1,state2,choice2,reward`).
    #[arg(long)]
    pub data: PathBuf,
    /// `mean` or `cvar`.
    #[arg(long, default_value = "cvar")]
    pub model: String,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Optional JSON file with a full parameter set; flags below override.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub eta2: Option<f64>,
    #[arg(long)]
    pub tau_sticky: Option<f64>,
    #[arg(long)]
    pub tau_2nd: Option<f64>,
    #[arg(long)]
    pub tau_mb: Option<f64>,
    #[arg(long)]
    pub tau_mf: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long, default_value_t = 50)]
    pub agents: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct Figure4Args {
    /// Risk level in [0.1, 1].
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = cvar_core::inference::DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct MisattributionArgs {
    #[arg(long)]
    pub alpha_gen: f64,
    #[arg(long, default_value_t = 50)]
    pub agents: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

pub fn run(cmd: &TwostepCmd) -> anyhow::Result<()> {
    match cmd {
        TwostepCmd::Fit(args) => run_fit(args),
        TwostepCmd::Simulate(args) => run_simulate(args),
        TwostepCmd::Recover(args) => run_recover(args),
        TwostepCmd::Figure4(args) => run_figure4(args),
        TwostepCmd::Misattribution(args) => run_misattribution(args),
    }
}

fn parse_model(name: &str) -> anyhow::Result<ModelKind> {
    match name {
        "mean" => Ok(ModelKind::Mean),
        "cvar" => Ok(ModelKind::Cvar),
        other => Err(usage(anyhow::anyhow!("unknown model `{other}` (mean|cvar)"))),
    }
}

fn run_fit(args: &FitArgs) -> anyhow::Result<()> {
    let model = parse_model(&args.model)?;
    let out_dir = resolve_out_dir(&args.out).map_err(usage)?;
    let text = std::fs::read_to_string(&args.data)
        .with_context(|| format!("reading trials file `{}`", args.data.display()))
        .map_err(usage)?;
    let trials = trials_from_csv(&text).map_err(usage)?;

    let result = fit(&trials, model, args.restarts, args.seed)?;
    write_output(&out_dir, "fit.json", &to_json_string(&Versioned::new(&result))?, args.force)?;
    write_manifest(
        &out_dir,
        Some(args.seed),
        serde_json::json!({
            "command": "twostep fit",
            "data": args.data.display().to_string(),
            "model": model.name(),
            "restarts": args.restarts,
        }),
        args.force,
    )?;
    println!(
        "fit {} model: nll={} bic={}",
        model.name(),
        g12(result.nll),
        g12(result.bic)
    );
    Ok(())
}

fn run_simulate(args: &SimArgs) -> anyhow::Result<()> {
    let out_dir = resolve_out_dir(&args.out).map_err(usage)?;
    let mut params = match &args.params {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading params file `{}`", path.display()))
                .map_err(usage)?;
            serde_json::from_str::<TwoStepParams>(&text)
                .with_context(|| format!("parsing params file `{}`", path.display()))
                .map_err(usage)?
        }
        None => cvar_core::inference::generative_params(0.3),
    };
    if let Some(v) = args.alpha {
        params.alpha = v;
    }
    if let Some(v) = args.lambda {
        params.lambda = v;
    }
    if let Some(v) = args.eta2 {
        params.eta2 = v;
    }
    if let Some(v) = args.tau_sticky {
        params.tau_sticky = v;
    }
    if let Some(v) = args.tau_2nd {
        params.tau_2nd = v;
    }
    if let Some(v) = args.tau_mb {
        params.tau_mb = v;
    }
    if let Some(v) = args.tau_mf {
        params.tau_mf = v;
    }
    params.validate().map_err(|e| usage(e.into()))?;

    let schedule = RewardSchedule::random_walk(args.trials, args.seed ^ 0x5eed);
    let trials = simulate_agent(&params, &schedule, args.trials, args.seed)?;
    write_output(&out_dir, "trials.csv", &trials_to_csv(&trials), args.force)?;
    write_manifest(
        &out_dir,
        Some(args.seed),
        serde_json::json!({
            "command": "twostep simulate",
            "params": params,
            "trials": args.trials,
        }),
        args.force,
    )?;
    println!("simulated {} trials -> {}", args.trials, out_dir.display());
    Ok(())
}

fn run_recover(args: &RecoverArgs) -> anyhow::Result<()> {
    let out_dir = resolve_out_dir(&args.out).map_err(usage)?;
    let generative = sample_generative_params(args.agents, args.seed ^ 0x6e5);
    let report = recover(&generative, args.trials, args.restarts, args.seed)?;

    // Long format: one row per (parameter, agent).
    let mut csv = String::from("parameter,agent,generative,recovered\n");
    for name in PARAM_NAMES {
        for i in 0..report.n_agents {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                name,
                i,
                g12(report.generative[i].get(name).unwrap()),
                g12(report.recovered[i].get(name).unwrap()),
            ));
        }
    }
    write_output(&out_dir, "recovery.csv", &csv, args.force)?;
    write_output(
        &out_dir,
        "recovery.json",
        &to_json_string(&Versioned::new(&report))?,
        args.force,
    )?;
    write_manifest(
        &out_dir,
        Some(args.seed),
        serde_json::json!({
            "command": "twostep recover",
            "agents": args.agents,
            "trials": args.trials,
            "restarts": args.restarts,
        }),
        args.force,
    )?;
    println!(
        "recovery on {} agents: rho(alpha)={} rho(lambda)={} rho(tau_2nd)={}",
        report.n_agents,
        g12(report.spearman.alpha),
        g12(report.spearman.lambda),
        g12(report.spearman.tau_2nd)
    );
    Ok(())
}

fn run_figure4(args: &Figure4Args) -> anyhow::Result<()> {
    let out_dir = resolve_out_dir(&args.out).map_err(usage)?;
    let overrides = Figure4Overrides {
        n_trials: Some(args.trials),
        ..Default::default()
    };
    let trace = figure4_trace(args.alpha, &overrides).map_err(|e| usage(e.into()))?;

    let switch = trace
        .switch_trial
        .map(|t| t.to_string())
        .unwrap_or_else(|| "none".into());
    let mut csv = String::from("trial,cvar_a,cvar_b,mean_a,mean_b,choice,switch_trial\n");
    for row in &trace.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.trial,
            g12(row.cvar_a),
            g12(row.cvar_b),
            g12(row.mean_a),
            g12(row.mean_b),
            row.choice,
            switch
        ));
    }
    write_output(&out_dir, "figure4.csv", &csv, args.force)?;
    write_manifest(
        &out_dir,
        None,
        serde_json::json!({
            "command": "twostep figure4",
            "alpha": args.alpha,
            "trials": args.trials,
        }),
        args.force,
    )?;
    println!("switch_trial={switch}");
    Ok(())
}

fn run_misattribution(args: &MisattributionArgs) -> anyhow::Result<()> {
    let out_dir = resolve_out_dir(&args.out).map_err(usage)?;
    let summary = misattribution_experiment(
        args.alpha_gen,
        args.agents,
        args.trials,
        args.restarts,
        args.seed,
    )?;
    write_output(
        &out_dir,
        "misattribution.json",
        &to_json_string(&Versioned::new(&summary))?,
        args.force,
    )?;
    write_manifest(
        &out_dir,
        Some(args.seed),
        serde_json::json!({
            "command": "twostep misattribution",
            "alpha_gen": args.alpha_gen,
            "agents": args.agents,
            "trials": args.trials,
            "restarts": args.restarts,
        }),
        args.force,
    )?;
    println!(
        "misattribution at alpha={}: median lambda={} median tau_sticky={}",
        g12(summary.alpha_gen),
        g12(summary.median_fitted_lambda),
        g12(summary.median_fitted_tau_sticky)
    );
    Ok(())
}
