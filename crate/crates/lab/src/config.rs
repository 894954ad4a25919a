//! Experiment configuration, read from TOML.
//!
//! ```toml
//! output = "out"
//! seed = 0
//!
//! [grid]
//! dim = 4
//! r_max = 80.0
//! n = 512
//!
//! [model]
//! nonlinearity = "quadratic"   # free | quadratic | power | phi4
//!
//! [data]
//! family = "scaled-ground-state"   # or "gaussian" / "file"
//! lambda = 0.8
//!
//! [evolution]
//! t_end = 50.0
//! dt = 1e-3
//! stride = 10
//!
//! [sweep]
//! lambdas = [0.6, 0.8, 0.9, 1.1, 1.2, 1.5]
//! ```
//!
//! Every other section has defaults; unknown keys are rejected.

use std::path::{Path, PathBuf};

use qkg_core::functionals::Nonlinearity;
use qkg_core::groundstate::ShootingOptions;
use qkg_core::normalform::AnalysisParams;
use qkg_core::spectral::{Dimension, RadialGrid};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub r_max: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { dim: 4, r_max: 80.0, n: 512 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityKind {
    Free,
    Quadratic,
    Power,
    Phi4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub nonlinearity: NonlinearityKind,
    /// Exponent `p` of `f = u^{p+1}` for the power family (and of the ground state).
    #[serde(default = "one")]
    pub power: u32,
}

fn one() -> u32 {
    1
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { nonlinearity: NonlinearityKind::Quadratic, power: 1 }
    }
}

impl ModelConfig {
    pub fn nonlinearity(&self) -> Nonlinearity {
        match self.nonlinearity {
            NonlinearityKind::Free => Nonlinearity::Free,
            NonlinearityKind::Quadratic => Nonlinearity::Quadratic,
            NonlinearityKind::Power => Nonlinearity::power(self.power),
            NonlinearityKind::Phi4 => Nonlinearity::Phi4,
        }
    }

    /// Power of the ground state that scales the `λQ` family.
    pub fn ground_state_power(&self) -> u32 {
        match self.nonlinearity {
            NonlinearityKind::Power => self.power,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundStateConfig {
    pub tol: f64,
    /// Initial shooting bracket for `Q(0)`; the lower end must undershoot.
    pub bracket: [f64; 2],
}

impl Default for GroundStateConfig {
    fn default() -> Self {
        let (lo, hi) = ShootingOptions::default().bracket;
        GroundStateConfig { tol: 1e-6, bracket: [lo, hi] }
    }
}

impl GroundStateConfig {
    pub fn shooting(&self) -> ShootingOptions {
        ShootingOptions { bracket: (self.bracket[0], self.bracket[1]), ..ShootingOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub beta: i32,
    pub kappa: f64,
    pub epsilon: f64,
    pub delta: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let p = AnalysisParams::default();
        AnalysisConfig { beta: p.beta, kappa: p.kappa, epsilon: p.epsilon, delta: p.delta }
    }
}

impl AnalysisConfig {
    pub fn params(&self) -> AnalysisParams {
        AnalysisParams { beta: self.beta, kappa: self.kappa, epsilon: self.epsilon, delta: self.delta }
    }
}

/// Initial data. The velocity is zero except for file input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataConfig {
    /// `(λQ, 0)`
    ScaledGroundState { lambda: f64 },
    /// `(A e^{-r²/w²}, 0)`
    Gaussian { amplitude: f64, width: f64 },
    /// CSV with columns `r,u0,u1` sampled at the grid nodes.
    File { path: PathBuf },
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig::ScaledGroundState { lambda: 0.8 }
    }
}

/// Seeded random perturbation added to `u0`: a sum of `modes` Gaussian bumps
/// with amplitudes uniform in `[-amplitude, amplitude]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    pub amplitude: f64,
    pub modes: usize,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        PerturbationConfig { amplitude: 0.0, modes: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub t_end: f64,
    pub dt: f64,
    pub stride: usize,
    /// Write every `trajectory_stride`-th tracked state to a trajectory file (0 disables).
    #[serde(default)]
    pub trajectory_stride: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig { t_end: 50.0, dt: 1e-3, stride: 10, trajectory_stride: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub lambdas: Vec<f64>,
    pub range: Option<RangeConfig>,
}

impl SweepConfig {
    /// The explicit list followed by the range points, sorted and deduplicated.
    pub fn values(&self) -> Vec<f64> {
        let mut v = self.lambdas.clone();
        if let Some(r) = &self.range {
            if r.count == 1 {
                v.push(r.start);
            } else {
                let step = (r.stop - r.start) / (r.count - 1) as f64;
                v.extend((0..r.count).map(|i| r.start + step * i as f64));
            }
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub blowup_factor: f64,
    pub scattering_cauchy: f64,
    /// `ε₁` of the `L³` window search.
    pub eps1: f64,
    /// `τ₁`: length of the `L³` window.
    pub tau1: f64,
    pub morawetz_radius: f64,
    pub boundary_tol: f64,
    /// Relative energy drift per unit time.
    pub energy_drift: f64,
    pub convexity: f64,
    pub morawetz_identity: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            blowup_factor: 1e3,
            scattering_cauchy: 1e-3,
            eps1: 0.5,
            tau1: 5.0,
            morawetz_radius: 10.0,
            boundary_tol: 1e-6,
            energy_drift: 1e-6,
            convexity: 1e-3,
            morawetz_identity: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub ground_state: GroundStateConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub perturbation: PerturbationConfig,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: GridConfig::default(),
            model: ModelConfig::default(),
            ground_state: GroundStateConfig::default(),
            analysis: AnalysisConfig::default(),
            data: DataConfig::default(),
            perturbation: PerturbationConfig::default(),
            evolution: EvolutionConfig::default(),
            sweep: SweepConfig::default(),
            thresholds: Thresholds::default(),
            output: default_output(),
            seed: 0,
        }
    }
}

fn positive(name: &str, v: f64) -> LabResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(LabError::Config(format!("{name} must be positive, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> LabResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> LabResult<()> {
        if !matches!(self.grid.dim, 1 | 3 | 4) {
            return Err(LabError::Config(format!("grid.dim must be 1, 3 or 4, got {}", self.grid.dim)));
        }
        positive("grid.r_max", self.grid.r_max)?;
        if self.grid.n < 16 {
            return Err(LabError::Config(format!("grid.n must be at least 16, got {}", self.grid.n)));
        }
        if self.model.power == 0 {
            return Err(LabError::Config("model.power must be at least 1".into()));
        }
        positive("ground_state.tol", self.ground_state.tol)?;
        let [lo, hi] = self.ground_state.bracket;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(LabError::Config(format!("ground_state.bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
        }
        // β itself is checked by the workflows that need the normal form, so
        // that `verify` can still report the modulation constant at small β
        AnalysisParams { beta: AnalysisParams::default().beta, ..self.analysis.params() }
            .validate()
            .map_err(|e| LabError::Config(format!("analysis: {e}")))?;
        match &self.data {
            DataConfig::ScaledGroundState { lambda } => positive("data.lambda", *lambda)?,
            DataConfig::Gaussian { amplitude, width } => {
                if !amplitude.is_finite() {
                    return Err(LabError::Config("data.amplitude must be finite".into()));
                }
                positive("data.width", *width)?;
            }
            DataConfig::File { .. } => {}
        }
        if !(self.perturbation.amplitude >= 0.0 && self.perturbation.amplitude.is_finite()) {
            return Err(LabError::Config("perturbation.amplitude must be non-negative".into()));
        }
        positive("evolution.t_end", self.evolution.t_end)?;
        positive("evolution.dt", self.evolution.dt)?;
        if self.evolution.stride == 0 {
            return Err(LabError::Config("evolution.stride must be at least 1".into()));
        }
        if let Some(r) = &self.sweep.range {
            if r.count == 0 {
                return Err(LabError::Config("sweep.range.count must be at least 1".into()));
            }
            positive("sweep.range.start", r.start)?;
            positive("sweep.range.stop", r.stop)?;
        }
        for &l in &self.sweep.lambdas {
            positive("sweep.lambdas entries", l)?;
        }
        let t = &self.thresholds;
        for (name, v) in [
            ("thresholds.blowup_factor", t.blowup_factor),
            ("thresholds.scattering_cauchy", t.scattering_cauchy),
            ("thresholds.eps1", t.eps1),
            ("thresholds.tau1", t.tau1),
            ("thresholds.morawetz_radius", t.morawetz_radius),
            ("thresholds.boundary_tol", t.boundary_tol),
            ("thresholds.energy_drift", t.energy_drift),
            ("thresholds.convexity", t.convexity),
            ("thresholds.morawetz_identity", t.morawetz_identity),
        ] {
            positive(name, v)?;
        }
        if t.blowup_factor <= 1.0 {
            return Err(LabError::Config("thresholds.blowup_factor must exceed 1".into()));
        }
        if self.grid.dim == 4 && t.morawetz_radius > 0.5 * self.grid.r_max {
            return Err(LabError::Config(format!(
                "thresholds.morawetz_radius {} exceeds half of grid.r_max",
                t.morawetz_radius
            )));
        }
        Ok(())
    }

    /// The sweep values, which must be non-empty.
    pub fn sweep_values(&self) -> LabResult<Vec<f64>> {
        let v = self.sweep.values();
        if v.is_empty() {
            return Err(LabError::Config("sweep needs at least one lambda".into()));
        }
        Ok(v)
    }

    pub fn dimension(&self) -> Dimension {
        Dimension::from_usize(self.grid.dim).expect("validated")
    }

    pub fn make_grid(&self) -> LabResult<RadialGrid> {
        Ok(RadialGrid::new(self.dimension(), self.grid.r_max, self.grid.n)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_uses_defaults() {
        let cfg = ExperimentConfig::from_toml("[grid]\ndim = 3\nr_max = 40.0\nn = 128\n").unwrap();
        assert_eq!(cfg.grid.dim, 3);
        assert_eq!(cfg.thresholds, Thresholds::default());
        assert_eq!(cfg.data, DataConfig::ScaledGroundState { lambda: 0.8 });
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = ExperimentConfig::default();
        cfg.sweep.range = Some(RangeConfig { start: 0.5, stop: 1.5, count: 3 });
        cfg.data = DataConfig::Gaussian { amplitude: 2.0, width: 1.5 };
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "[grid]\ndim = 2\nr_max = 1.0\nn = 64\n",
            "[grid]\ndim = 4\nr_max = -1.0\nn = 64\n",
            "[evolution]\nt_end = 1.0\ndt = 0.0\nstride = 1\n",
            "[analysis]\nbeta = 6\nkappa = 0.001\nepsilon = 0.5\ndelta = 0.01\n",
            "[thresholds]\nmorawetz_radius = 60.0\n",
            "[data]\nfamily = \"scaled-ground-state\"\nlambda = -1.0\n",
            "[sweep]\nlambdas = [0.5, 0.0]\n",
            "[grid]\ndim = 4\nr_max = 80.0\nn = 512\nextra = 1\n",
        ] {
            assert!(matches!(ExperimentConfig::from_toml(text), Err(LabError::Config(_))), "{text}");
        }
    }

    #[test]
    fn sweep_values_merge_list_and_range() {
        let s = SweepConfig { lambdas: vec![1.5, 0.6], range: Some(RangeConfig { start: 0.6, stop: 1.0, count: 3 }) };
        assert_eq!(s.values(), vec![0.6, 0.8, 1.0, 1.5]);
        assert!(ExperimentConfig::default().sweep_values().is_err());
    }
}
