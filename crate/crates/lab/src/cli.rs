//! Command-line interface. Parsing lives here so the binary stays a thin
//! wrapper and tests can drive whole subcommands in-process.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::data::GroundStateCache;
use crate::error::{LabError, LabResult};
use crate::output::{ensure_dir, lambda_tag, path_in, write_bytes, write_json, TrajectoryFile};
use crate::workflows::{
    classify_config, ground_state, norms_of, run_single, run_sweep, run_verify, sweep_csv, RunManifest, CLASSIFY_SCHEMA,
};

#[derive(Debug, Parser)]
#[command(name = "qkg", version, about = "Threshold dynamics of the quadratic Klein-Gordon equation")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output` in the configuration.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for the perturbation family, overriding `seed`.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Sweep worker threads; 0 lets the pool decide.
    #[arg(long, global = true, value_name = "K", default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the ground state and check its identities.
    GroundState,
    /// Place the configured data (or every sweep value) in K⁺ or K⁻.
    Classify,
    /// Evolve one initial datum and run every tracker.
    Evolve {
        /// Scale the ground state (or the Gaussian amplitude) by this factor.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Evolve every sweep value and tabulate the verdicts.
    Sweep,
    /// Run the identity and property checks.
    Verify,
    /// Evaluate Besov and space-time norms on a stored trajectory.
    Norms {
        #[arg(long, value_name = "PATH")]
        trajectory: PathBuf,
    },
}

/// Load the configuration and apply the command-line overrides.
pub fn resolve_config(global: &GlobalArgs) -> LabResult<ExperimentConfig> {
    let mut cfg = match &global.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &global.out {
        cfg.output = out.clone();
    }
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Run one subcommand and return the files it wrote.
pub fn execute(cli: &Cli) -> LabResult<Vec<PathBuf>> {
    let cfg = resolve_config(&cli.global)?;
    let cache = GroundStateCache::new();
    let dir = cfg.output.clone();
    let mut written = Vec::new();
    match &cli.command {
        Command::GroundState => {
            let (summary, q) = ground_state(&cfg, &cache)?;
            written.push(emit_json(&dir, "ground_state.json", &summary)?);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["r", "Q"])?;
            for (r, v) in q.profile.grid.nodes().iter().zip(&q.profile.values) {
                w.write_record([format!("{r:e}"), format!("{:e}", v.re)])?;
            }
            let bytes = w.into_inner().map_err(|e| LabError::Format(e.to_string()))?;
            written.push(write_file(&dir, "ground_state_profile.csv", &bytes)?);
        }
        Command::Classify => {
            let rows = classify_config(&cfg, &cache)?;
            written.push(emit_json(
                &dir,
                "classify.json",
                &serde_json::json!({ "schema": CLASSIFY_SCHEMA, "config": cfg, "rows": rows }),
            )?);
        }
        Command::Evolve { lambda } => {
            let outcome = run_single(&cfg, &cache, *lambda, false)?;
            written.push(emit_json(&dir, "run.json", &RunManifest::new(&cfg, &outcome.summary))?);
            written.push(write_file(&dir, "timeseries.csv", &outcome.timeseries)?);
            if let Some(t) = &outcome.trajectory {
                written.push(emit_json(&dir, "trajectory.json", t)?);
            }
        }
        Command::Sweep => {
            let (summary, outcomes) = run_sweep(&cfg, &cache, cli.global.threads)?;
            written.push(emit_json(&dir, "sweep.json", &summary)?);
            written.push(write_file(&dir, "sweep.csv", &sweep_csv(&summary)?)?);
            for o in &outcomes {
                let tag = lambda_tag(o.summary.lambda.expect("sweep runs carry λ"));
                written.push(write_file(&dir, &format!("timeseries_{tag}.csv"), &o.timeseries)?);
            }
        }
        Command::Verify => {
            let report = run_verify(&cfg, &cache)?;
            written.push(emit_json(&dir, "verify.json", &report)?);
            if !report.passed {
                return Err(LabError::Verification(report.failures()));
            }
        }
        Command::Norms { trajectory } => {
            let traj = TrajectoryFile::read(trajectory)?.to_trajectory()?;
            let report = norms_of(&traj, &cfg)?;
            written.push(emit_json(&dir, "norms.json", &report)?);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["t", "besov_H1"])?;
            for (t, v) in &report.energy_besov {
                w.write_record([format!("{t:e}"), format!("{v:e}")])?;
            }
            let bytes = w.into_inner().map_err(|e| LabError::Format(e.to_string()))?;
            written.push(write_file(&dir, "norms.csv", &bytes)?);
        }
    }
    Ok(written)
}

fn emit_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> LabResult<PathBuf> {
    ensure_dir(dir)?;
    let p = path_in(dir, name);
    write_json(&p, value)?;
    Ok(p)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> LabResult<PathBuf> {
    ensure_dir(dir)?;
    let p = path_in(dir, name);
    write_bytes(&p, bytes)?;
    Ok(p)
}
