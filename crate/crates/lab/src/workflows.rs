//! The computations behind each subcommand. Nothing here writes files.

use std::sync::Arc;

use qkg_core::evolution::{
    detect_blowup_with, evolve, l3_track, morawetz_track, scattering_extract, CubeWindow, RunRecord, RunVerdict,
    Trackers, Trajectory,
};
use qkg_core::functionals::{classify, Nonlinearity, Region};
use qkg_core::groundstate::verify_gn;
use qkg_core::groundstate::{ground_state_report, GroundState};
use qkg_core::normalform::{
    measure_modulation_bound, normal_form_residual_with, AnalysisParams, BilinearEngine, DEFAULT_ANGLES,
};
use qkg_core::spectral::{
    besov_norm, half_wave, half_wave_spectral, inverse_transform, lp_project, lp_project_below, spacetime_norm,
    transform, BesovSpec, Dimension, RadialField, RadialGrid, SpaceTimeNormSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::data::{initial_data, GroundStateCache};
use crate::error::{LabError, LabResult};
use crate::output::{timeseries_csv, TrajectoryFile};

pub const GROUND_STATE_SCHEMA: &str = "qkg-ground-state/1";
pub const RUN_SCHEMA: &str = "qkg-run/1";
pub const SWEEP_SCHEMA: &str = "qkg-sweep/1";
pub const VERIFY_SCHEMA: &str = "qkg-verify/1";
pub const NORMS_SCHEMA: &str = "qkg-norms/1";
pub const CLASSIFY_SCHEMA: &str = "qkg-classify/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Identities {
    pub energy_identity: f64,
    pub pohozaev: f64,
    pub gn_equality: Option<f64>,
    pub j_minus_e: f64,
    pub half_mass: Option<f64>,
    /// `‖∇Q‖²/‖Q‖²`
    pub grad_over_mass: f64,
    /// `∫Q^{p+2}/‖Q‖²`
    pub pot_over_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStateSummary {
    pub schema: &'static str,
    pub dim: usize,
    pub p: u32,
    pub n: usize,
    pub r_max: f64,
    pub tol: f64,
    pub b_star: f64,
    pub b_width: f64,
    pub bisection_steps: usize,
    pub r_match: f64,
    pub mass_sq: f64,
    pub grad_sq: f64,
    pub pot_int: f64,
    pub j_q: f64,
    pub e_q0: f64,
    pub identities: Identities,
}

pub fn ground_state(
    cfg: &ExperimentConfig,
    cache: &GroundStateCache,
) -> LabResult<(GroundStateSummary, Arc<GroundState>)> {
    let grid = cfg.make_grid()?;
    let q = cache.get(&grid, cfg.model.ground_state_power(), &cfg.ground_state)?;
    let rep = ground_state_report(&q);
    let m = q.norms.mass_sq;
    let summary = GroundStateSummary {
        schema: GROUND_STATE_SCHEMA,
        dim: cfg.grid.dim,
        p: q.p,
        n: grid.len(),
        r_max: grid.r_max(),
        tol: cfg.ground_state.tol,
        b_star: q.b_star,
        b_width: q.b_width,
        bisection_steps: q.bisection_steps,
        r_match: q.r_match,
        mass_sq: m,
        grad_sq: q.norms.grad_sq,
        pot_int: q.norms.pot_int,
        j_q: q.j_q,
        e_q0: q.e_q0,
        identities: Identities {
            energy_identity: rep.energy_identity,
            pohozaev: rep.pohozaev,
            gn_equality: rep.gn_equality,
            j_minus_e: rep.j_minus_e,
            half_mass: rep.half_mass,
            grad_over_mass: q.norms.grad_sq / m,
            pot_over_mass: q.norms.pot_int / m,
        },
    };
    Ok((summary, q))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub lambda: Option<f64>,
    pub region: &'static str,
    pub boundary: bool,
    pub energy: f64,
    pub energy_threshold: f64,
    pub mass_ratio: f64,
    pub k10: f64,
    pub k_virial: f64,
}

pub fn region_name(r: Region) -> &'static str {
    match r {
        Region::KPlus => "K+",
        Region::KMinus => "K-",
        Region::Indeterminate => "indeterminate",
    }
}

fn classifiable(cfg: &ExperimentConfig) -> bool {
    cfg.grid.dim == 4 && cfg.model.nonlinearity() == Nonlinearity::Quadratic
}

fn classify_fields(
    cfg: &ExperimentConfig,
    cache: &GroundStateCache,
    u0: &RadialField,
    u1: &RadialField,
    lambda: Option<f64>,
) -> LabResult<Option<Classification>> {
    if !classifiable(cfg) {
        return Ok(None);
    }
    let q = cache.get(&u0.grid, 1, &cfg.ground_state)?;
    let v = classify(u0, u1, &q)?;
    Ok(Some(Classification {
        lambda,
        region: region_name(v.region),
        boundary: v.boundary,
        energy: v.energy,
        energy_threshold: v.energy_threshold,
        mass_ratio: v.mass_ratio,
        k10: v.k10,
        k_virial: v.k_virial,
    }))
}

/// Classify the configured data, or every sweep value when a sweep is configured.
pub fn classify_config(cfg: &ExperimentConfig, cache: &GroundStateCache) -> LabResult<Vec<Classification>> {
    if !classifiable(cfg) {
        return Err(LabError::Config("classification needs grid.dim = 4 and the quadratic nonlinearity".into()));
    }
    let grid = cfg.make_grid()?;
    let lambdas: Vec<Option<f64>> =
        if cfg.sweep.values().is_empty() { vec![None] } else { cfg.sweep.values().into_iter().map(Some).collect() };
    lambdas
        .into_iter()
        .map(|l| {
            let d = initial_data(cfg, &grid, cache, l)?;
            Ok(classify_fields(cfg, cache, &d.u0, &d.u1, l)?.expect("classifiable"))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexitySummary {
    pub max_resolved_residual: f64,
    pub resolved_points: usize,
    pub h1_growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSummary {
    pub t_lo: f64,
    pub t_hi: f64,
    pub integral: f64,
    pub bound_scale: f64,
    pub constant: f64,
}

impl From<&CubeWindow> for WindowSummary {
    fn from(w: &CubeWindow) -> Self {
        WindowSummary {
            t_lo: w.t_lo,
            t_hi: w.t_hi,
            integral: w.integral,
            bound_scale: w.bound_scale,
            constant: w.constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorawetzSummary {
    pub radius: f64,
    /// `max |M| / R`
    pub m_constant: f64,
    pub max_residual: f64,
    pub windows: Vec<WindowSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L3Summary {
    pub tau: f64,
    pub best_window_end: Option<f64>,
    pub best_window_sup: Option<f64>,
    pub first_below_eps1: Option<f64>,
    pub final_l3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringSummary {
    pub times: Vec<f64>,
    pub consecutive: Vec<f64>,
    pub max_cauchy: f64,
    pub corrected_consecutive: Vec<f64>,
    pub omega_h1: Vec<f64>,
    pub threshold: f64,
    pub scattered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub lambda: Option<f64>,
    pub classification: Option<Classification>,
    pub verdict: &'static str,
    /// Reached `t_end` without blow-up or contamination.
    pub global: bool,
    pub t_final: f64,
    pub blowup_time: Option<f64>,
    pub boundary_abort: Option<f64>,
    pub samples: usize,
    pub energy0: f64,
    /// `max_t |E(t) - E(0)| / |E(0)|` divided by the run length.
    pub energy_drift_rate: f64,
    pub max_h1: f64,
    /// `‖u(t)‖₂ < ‖Q‖₂` at every sample (K⁺ runs).
    pub mass_gap: Option<bool>,
    /// `K_{1,0}(u(t)) ≥ 0` at every sample (K⁺ runs).
    pub k10_nonnegative: Option<bool>,
    pub convexity: Option<ConvexitySummary>,
    pub morawetz: Option<MorawetzSummary>,
    pub l3: Option<L3Summary>,
    pub scattering: Option<ScatteringSummary>,
    /// Names of the checks this run failed.
    pub failed_checks: Vec<String>,
}

pub fn verdict_name(v: RunVerdict) -> &'static str {
    match v {
        RunVerdict::Scattered => "scattered",
        RunVerdict::BlewUp => "blew-up",
        RunVerdict::Undetermined => "undetermined",
    }
}

/// A finished run with its serialized time series.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub timeseries: Vec<u8>,
    pub trajectory: Option<TrajectoryFile>,
    /// The raw record; its stored states are dropped unless requested.
    pub record: RunRecord,
}

/// Evolve the configured data (scaled by `lambda` if given) and run every tracker.
pub fn run_single(
    cfg: &ExperimentConfig,
    cache: &GroundStateCache,
    lambda: Option<f64>,
    keep_states: bool,
) -> LabResult<RunOutcome> {
    cfg.analysis.params().validate().map_err(|e| LabError::Config(format!("analysis: {e}")))?;
    let grid = cfg.make_grid()?;
    let nl = cfg.model.nonlinearity();
    let data = initial_data(cfg, &grid, cache, lambda)?;
    let th = &cfg.thresholds;
    let morawetz_radius = (grid.dim() == Dimension::Four).then_some(th.morawetz_radius);
    let trackers = Trackers {
        stride: cfg.evolution.stride,
        keep_states: true,
        blowup_factor: th.blowup_factor,
        boundary_tol: th.boundary_tol,
        morawetz_radius,
    };
    let mut record = evolve(&data.u0, &data.u1, nl, cfg.evolution.t_end, cfg.evolution.dt, &trackers)?;
    let classification = classify_fields(cfg, cache, &data.u0, &data.u1, lambda)?;
    let mut failed = Vec::new();

    let blew_up = record.blowup_time.is_some();
    let t_final = record.samples.last().map_or(0.0, |s| s.t);
    let energy0 = record.samples[0].energy;
    let drift = record.max_energy_drift();
    let energy_drift_rate = if t_final > 0.0 { drift / energy0.abs().max(f64::MIN_POSITIVE) / t_final } else { 0.0 };
    if !blew_up && energy_drift_rate > th.energy_drift {
        failed.push("energy drift".to_string());
    }
    if record.boundary_abort.is_some() {
        failed.push("boundary contamination".to_string());
    }
    let (mut mass_gap, mut k10_nonnegative) = (None, None);
    if classification.as_ref().is_some_and(|c| c.region == "K+") {
        let q = cache.get(&grid, 1, &cfg.ground_state)?;
        let gap = record.samples.iter().all(|s| s.l2_sq < q.norms.mass_sq);
        let sign = record.samples.iter().all(|s| s.k10 >= 0.0);
        if !gap {
            failed.push("mass gap".to_string());
        }
        if !sign {
            failed.push("K10 sign".to_string());
        }
        mass_gap = Some(gap);
        k10_nonnegative = Some(sign);
    }
    let traj = &record.trajectory;
    let convexity = if traj.states.len() >= 5 {
        let b = detect_blowup_with(traj, th.blowup_factor)?;
        if b.max_resolved_residual > th.convexity {
            failed.push("convexity identity".to_string());
        }
        Some(ConvexitySummary {
            max_resolved_residual: b.max_resolved_residual,
            resolved_points: b.resolved_points,
            h1_growth: b.h1_growth,
        })
    } else {
        None
    };
    let healthy = !blew_up && traj.states.len() >= 5;
    let morawetz = match morawetz_radius {
        Some(r) if healthy => {
            let m = morawetz_track(traj, r)?;
            if m.max_residual > th.morawetz_identity {
                failed.push("Morawetz identity".to_string());
            }
            Some(MorawetzSummary {
                radius: r,
                m_constant: m.m_constant,
                max_residual: m.max_residual,
                windows: m.windows.iter().map(WindowSummary::from).collect(),
            })
        }
        _ => None,
    };
    let l3 = if healthy {
        let l = l3_track(traj, th.tau1)?;
        Some(L3Summary {
            tau: th.tau1,
            best_window_end: l.best_window.map(|w| w.0),
            best_window_sup: l.best_window.map(|w| w.1),
            first_below_eps1: l.first_window_below(th.eps1),
            final_l3: *l.l3.last().unwrap_or(&0.0),
        })
    } else {
        None
    };
    let scattering = if healthy && record.boundary_abort.is_none() {
        let t = t_final;
        match scattering_extract(traj, &[0.5 * t, 0.75 * t, t], &cfg.analysis.params(), th.scattering_cauchy) {
            Ok(s) => Some(ScatteringSummary {
                times: s.times.clone(),
                max_cauchy: s.cauchy.iter().flatten().copied().fold(0.0, f64::max),
                consecutive: s.consecutive,
                corrected_consecutive: s.corrected_consecutive,
                omega_h1: s.omega_h1,
                threshold: s.threshold,
                scattered: s.scattered,
            }),
            // sample times that miss the stored grid of states: no scattering claim
            Err(qkg_core::Error::Parameter(_)) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let verdict = if blew_up {
        RunVerdict::BlewUp
    } else if scattering.as_ref().is_some_and(|s| s.scattered) {
        RunVerdict::Scattered
    } else {
        RunVerdict::Undetermined
    };
    let verdict = if failed.is_empty() { verdict } else { RunVerdict::Undetermined };
    record.verdict = verdict;
    let summary = RunSummary {
        lambda,
        classification,
        verdict: verdict_name(verdict),
        global: !blew_up
            && record.boundary_abort.is_none()
            && (t_final - cfg.evolution.t_end).abs() < 0.5 * cfg.evolution.dt,
        t_final,
        blowup_time: record.blowup_time,
        boundary_abort: record.boundary_abort,
        samples: record.samples.len(),
        energy0,
        energy_drift_rate,
        max_h1: record.samples.iter().map(|s| s.h1).fold(0.0, f64::max),
        mass_gap,
        k10_nonnegative,
        convexity,
        morawetz,
        l3,
        scattering,
        failed_checks: failed,
    };
    let timeseries = timeseries_csv(&record)?;
    let trajectory = match cfg.evolution.trajectory_stride {
        0 => None,
        k => Some(TrajectoryFile::from_trajectory(&record.trajectory, k)?),
    };
    if !keep_states {
        record.trajectory.states = Vec::new();
    }
    Ok(RunOutcome { summary, timeseries, trajectory, record })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub schema: &'static str,
    pub config: ExperimentConfig,
    pub runs: Vec<RunSummary>,
    /// Largest λ without blow-up below the smallest λ that blew up, and that λ.
    pub threshold_interval: Option<(f64, f64)>,
    /// No global or scattered run sits above a blown-up one.
    pub monotone: bool,
}

fn sweep_table(runs: &[RunSummary]) -> (Option<(f64, f64)>, bool) {
    let lam = |r: &RunSummary| r.lambda.unwrap_or(f64::NAN);
    let first_blowup = runs.iter().filter(|r| r.verdict == "blew-up").map(lam).fold(f64::INFINITY, f64::min);
    let monotone = !runs.iter().any(|r| (r.global || r.verdict == "scattered") && lam(r) > first_blowup);
    let below = runs.iter().filter(|r| r.global && lam(r) < first_blowup).map(lam).fold(f64::NEG_INFINITY, f64::max);
    let interval = (first_blowup.is_finite() && below.is_finite()).then_some((below, first_blowup));
    (interval, monotone)
}

/// Run every sweep value on a pool of `threads` workers (0 = rayon default).
/// Results are ordered by λ regardless of scheduling.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    cache: &GroundStateCache,
    threads: usize,
) -> LabResult<(SweepSummary, Vec<RunOutcome>)> {
    let lambdas = cfg.sweep_values()?;
    if matches!(cfg.data, crate::config::DataConfig::File { .. }) {
        return Err(LabError::Config("a sweep scales λQ or a Gaussian; file data cannot be swept".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<RunOutcome> =
        pool.install(|| lambdas.par_iter().map(|&l| run_single(cfg, cache, Some(l), false)).collect::<LabResult<_>>())?;
    let runs: Vec<RunSummary> = outcomes.iter().map(|o| o.summary.clone()).collect();
    let (threshold_interval, monotone) = sweep_table(&runs);
    Ok((SweepSummary { schema: SWEEP_SCHEMA, config: cfg.clone(), runs, threshold_interval, monotone }, outcomes))
}

/// The sweep verdict table as CSV.
pub fn sweep_csv(summary: &SweepSummary) -> LabResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "lambda",
        "region",
        "verdict",
        "global",
        "t_final",
        "blowup_time",
        "energy_drift_rate",
        "mass_gap",
        "k10_nonnegative",
        "convexity_residual",
        "morawetz_residual",
        "max_cauchy",
        "failed_checks",
    ])?;
    let f = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    let b = |v: Option<bool>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &summary.runs {
        w.write_record([
            f(r.lambda),
            r.classification.as_ref().map(|c| c.region.to_string()).unwrap_or_default(),
            r.verdict.to_string(),
            r.global.to_string(),
            f(Some(r.t_final)),
            f(r.blowup_time),
            f(Some(r.energy_drift_rate)),
            b(r.mass_gap),
            b(r.k10_nonnegative),
            f(r.convexity.as_ref().map(|c| c.max_resolved_residual)),
            f(r.morawetz.as_ref().map(|m| m.max_residual)),
            f(r.scattering.as_ref().map(|s| s.max_cauchy)),
            r.failed_checks.join(";"),
        ])?;
    }
    w.into_inner().map_err(|e| LabError::Format(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRow {
    pub name: String,
    pub value: f64,
    pub parts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormsReport {
    pub schema: &'static str,
    pub t_start: f64,
    pub t_end: f64,
    pub composite: Vec<NormRow>,
    /// `(t, ‖u(t)‖_{B^1_{2,2}})`
    pub energy_besov: Vec<(f64, f64)>,
}

/// Besov and space-time norms of a stored trajectory.
pub fn norms_of(traj: &Trajectory, cfg: &ExperimentConfig) -> LabResult<NormsReport> {
    if traj.states.len() < 2 {
        return Err(LabError::Format("a trajectory needs at least two states".into()));
    }
    let fields: Vec<RadialField> = traj.states.iter().map(|s| s.u()).collect();
    let d = traj.states[0].grid().dim().as_usize();
    let p = cfg.analysis.params();
    let mut composite = Vec::new();
    if d != 1 {
        for norm in [p.strong_norm(d)?, p.weak_norm(d)?, p.z_norm(d)?] {
            let (value, parts) = norm.evaluate(&fields, traj.dt)?;
            composite.push(NormRow { name: norm.name, value, parts });
        }
    }
    let value = spacetime_norm(&fields, traj.dt, &SpaceTimeNormSpec::energy())?;
    composite.push(NormRow { name: "L^inf_t H^1".into(), value, parts: vec![value] });
    let spec = BesovSpec::single(0.5, 1.0);
    let energy_besov =
        traj.states.iter().zip(&fields).map(|(s, f)| Ok((s.t, besov_norm(f, &spec)?))).collect::<LabResult<_>>()?;
    Ok(NormsReport {
        schema: NORMS_SCHEMA,
        t_start: traj.states[0].t,
        t_end: traj.states.last().map_or(0.0, |s| s.t),
        composite,
        energy_besov,
    })
}

/// What `evolve` persists as `run.json`: the summary plus the full config.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest<'a> {
    pub schema: &'static str,
    pub config: &'a ExperimentConfig,
    pub summary: &'a RunSummary,
}

impl<'a> RunManifest<'a> {
    pub fn new(config: &'a ExperimentConfig, summary: &'a RunSummary) -> Self {
        RunManifest { schema: RUN_SCHEMA, config, summary }
    }
}

/// Self-convergence of the normal-form residual under step halving.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalFormConvergence {
    pub beta: i32,
    pub dts: Vec<f64>,
    /// Largest residual over the samples of each run.
    pub residuals: Vec<f64>,
    /// `log₂(r_k / r_{k+1})`
    pub orders: Vec<f64>,
}

impl NormalFormConvergence {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Evolve a Gaussian bump with every step size in `dts`, sampling every step,
/// and compare the reduced-equation residuals.
pub fn normal_form_convergence(
    grid: &RadialGrid,
    amplitude: f64,
    width: f64,
    t_end: f64,
    dts: &[f64],
    params: &AnalysisParams,
) -> LabResult<NormalFormConvergence> {
    if dts.len() < 2 {
        return Err(LabError::Config("convergence needs at least two step sizes".into()));
    }
    let u0 = RadialField::from_fn(grid, |r| amplitude * (-r * r / (width * width)).exp())?;
    let u1 = RadialField::zeros(grid);
    let engine = BilinearEngine::new(grid, DEFAULT_ANGLES)?;
    let trackers = Trackers { stride: 1, ..Trackers::default() };
    let mut residuals = Vec::with_capacity(dts.len());
    for &dt in dts {
        let rec = evolve(&u0, &u1, Nonlinearity::Quadratic, t_end, dt, &trackers)?;
        if rec.blowup_time.is_some() || rec.boundary_abort.is_some() {
            return Err(LabError::Config(format!("convergence run with dt = {dt} did not stay small and interior")));
        }
        let terms = normal_form_residual_with(&rec.trajectory, params, &engine)?;
        residuals.push(terms.iter().map(|t| t.residual).fold(0.0, f64::max));
    }
    let orders = residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(NormalFormConvergence { beta: params.beta, dts: dts.to_vec(), residuals, orders })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// How `measured` compares with `tolerance`.
    pub sense: &'static str,
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    fn at_most(name: &str, measured: f64, tolerance: f64) -> Self {
        Check { name: name.into(), measured, tolerance, passed: measured <= tolerance, sense: "<=" }
    }

    /// Passes when `measured ≥ tolerance`.
    fn at_least(name: &str, measured: f64, tolerance: f64) -> Self {
        Check { name: name.into(), measured, tolerance, passed: measured >= tolerance, sense: ">=" }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: measured {:e}, needs {} {:e}", c.name, c.measured, c.sense, c.tolerance))
            .collect()
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn spectral_checks(grid: &RadialGrid, out: &mut Vec<Check>) -> LabResult<()> {
    let w = grid.r_max() / 16.0;
    let f = RadialField::from_fn(grid, |r| (-r * r / (w * w)).exp() * (1.0 + 0.3 * (r / w).cos()))?;
    let fh = transform(&f);
    let back = inverse_transform(&fh);
    let round_trip = back.sub(&f)?.max_abs() / f.max_abs();
    out.push(Check::at_most("spectral.parseval", relative(fh.l2_norm(), f.l2_norm()), 1e-8));
    out.push(Check::at_most("spectral.round_trip", round_trip, 1e-8));
    let win = grid.dyadic_window();
    let mut sum = lp_project_below(&f, win.lo - 1);
    for k in win.iter() {
        sum = sum.add(&lp_project(&f, k))?;
    }
    out.push(Check::at_most("spectral.lp_partition", sum.sub(&f)?.max_abs() / f.max_abs(), 1e-8));
    let h1 = f.sobolev_norm(1.0);
    out.push(Check::at_most("spectral.half_wave_unitarity", relative(half_wave(&f, 5.0).sobolev_norm(1.0), h1), 1e-8));
    let two = half_wave_spectral(&half_wave_spectral(&fh, 2.0), 3.0);
    let one = half_wave_spectral(&fh, 5.0);
    let group = two.coeffs.iter().zip(&one.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let scale = fh.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    out.push(Check::at_most("spectral.half_wave_group", group / scale, 1e-8));
    Ok(())
}

fn ground_state_checks(
    cfg: &ExperimentConfig,
    cache: &GroundStateCache,
    grid: &RadialGrid,
    out: &mut Vec<Check>,
) -> LabResult<()> {
    const TOL: f64 = 1e-4;
    let q = cache.get(grid, cfg.model.ground_state_power(), &cfg.ground_state)?;
    let rep = ground_state_report(&q);
    out.push(Check::at_most("ground_state.energy_identity", rep.energy_identity.abs(), TOL));
    out.push(Check::at_most("ground_state.pohozaev", rep.pohozaev.abs(), TOL));
    out.push(Check::at_most("ground_state.j_minus_e", rep.j_minus_e.abs(), TOL));
    if let Some(h) = rep.half_mass {
        out.push(Check::at_most("ground_state.half_mass", h.abs(), TOL));
    }
    if let Some(g) = rep.gn_equality {
        out.push(Check::at_most("ground_state.gn_equality", g.abs(), TOL));
    }
    let d = grid.dim().as_usize();
    if d == 1 && q.p == 1 {
        let sup = grid
            .nodes()
            .iter()
            .zip(&q.profile.values)
            .map(|(&r, v)| (v.re - 1.5 / (0.5 * r).cosh().powi(2)).abs())
            .fold(0.0, f64::max);
        out.push(Check::at_most("ground_state.sech2_profile", sup, 1e-6));
        out.push(Check::at_most("ground_state.b_star", (q.b_star - 1.5).abs(), 1e-6));
    }
    if q.p as usize * d == 4 {
        let check = verify_gn(&q.profile, &q)?;
        out.push(Check::at_most("gn.equality_at_q", (check.lhs / check.rhs - 1.0).abs(), TOL));
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut margin = f64::INFINITY;
        for _ in 0..10 {
            let amp = rng.gen_range(0.1..3.0);
            let width = rng.gen_range(0.5..4.0);
            let g = RadialField::from_fn(grid, |r| amp * (-r * r / (width * width)).exp())?;
            let c = verify_gn(&g, &q)?;
            margin = margin.min(1.0 - c.lhs / c.rhs);
        }
        out.push(Check::at_least("gn.strict_margin_gaussians", margin, 1e-6));
    }
    Ok(())
}

/// Run every identity and property check. Dynamic checks use fixed small
/// four-dimensional setups so that `verify` stays at desk scale.
pub fn run_verify(cfg: &ExperimentConfig, cache: &GroundStateCache) -> LabResult<VerifyReport> {
    let grid = cfg.make_grid()?;
    let mut checks = Vec::new();
    spectral_checks(&grid, &mut checks)?;
    ground_state_checks(cfg, cache, &grid, &mut checks)?;

    let beta = cfg.analysis.beta;
    let m1 = measure_modulation_bound(beta, 10_000);
    let m2 = measure_modulation_bound(beta, 20_000);
    checks.push(Check::at_least("normal_form.modulation_bound", m1.c, 0.5));
    checks.push(Check::at_most("normal_form.modulation_stability", relative(m2.c, m1.c), 0.1));

    let small = RadialGrid::new(Dimension::Four, 40.0, 256)?;
    let nf = normal_form_convergence(&small, 0.3, 2.0, 4.0, &[0.2, 0.1, 0.05], &AnalysisParams::with_beta(10)?)?;
    checks.push(Check::at_least("normal_form.residual_order", nf.min_order(), 3.5));

    let gs = crate::config::GroundStateConfig::default();
    let q = cache.get(&small, 1, &gs)?;
    let zero = RadialField::zeros(&small);
    let tr = Trackers { morawetz_radius: Some(5.0), ..Trackers::default() };
    let rec = evolve(&q.profile.scale(0.8), &zero, Nonlinearity::Quadratic, 2.0, 1e-3, &tr)?;
    let m = morawetz_track(&rec.trajectory, 5.0)?;
    checks.push(Check::at_most("evolution.morawetz_identity", m.max_residual, 1e-3));
    let e0 = rec.samples[0].energy.abs();
    checks.push(Check::at_most("evolution.energy_drift_rate", rec.max_energy_drift() / e0 / 2.0, 1e-6));

    let rec = evolve(&q.profile.scale(1.5), &zero, Nonlinearity::Quadratic, 5.0, 1e-3, &Trackers::default())?;
    let b = detect_blowup_with(&rec.trajectory, 1e3)?;
    checks.push(Check::at_least("evolution.blowup_detected", f64::from(u8::from(b.blew_up)), 1.0));
    checks.push(Check::at_most("evolution.convexity_identity", b.max_resolved_residual, 1e-3));

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { schema: VERIFY_SCHEMA, config: cfg.clone(), checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(lambda: f64, verdict: &'static str, global: bool) -> RunSummary {
        RunSummary {
            lambda: Some(lambda),
            classification: None,
            verdict,
            global,
            t_final: 1.0,
            blowup_time: None,
            boundary_abort: None,
            samples: 1,
            energy0: 1.0,
            energy_drift_rate: 0.0,
            max_h1: 1.0,
            mass_gap: None,
            k10_nonnegative: None,
            convexity: None,
            morawetz: None,
            l3: None,
            scattering: None,
            failed_checks: vec![],
        }
    }

    #[test]
    fn threshold_interval_and_monotonicity() {
        let runs = vec![
            run(0.6, "undetermined", true),
            run(0.9, "scattered", true),
            run(1.1, "blew-up", false),
            run(1.5, "blew-up", false),
        ];
        assert_eq!(sweep_table(&runs), (Some((0.9, 1.1)), true));
        let runs = vec![run(0.6, "blew-up", false), run(0.9, "undetermined", true)];
        assert_eq!(sweep_table(&runs), (None, false));
        let runs = vec![run(0.6, "undetermined", true)];
        assert_eq!(sweep_table(&runs), (None, true));
    }
}
