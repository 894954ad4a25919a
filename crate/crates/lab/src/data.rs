//! Initial data and the ground-state cache.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex};

use qkg_core::groundstate::{solve_ground_state_with, GroundState};
use qkg_core::spectral::{RadialField, RadialGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{DataConfig, ExperimentConfig, GroundStateConfig, PerturbationConfig};
use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    dim: usize,
    p: u32,
    n: usize,
    r_max: u64,
    tol: u64,
    bracket: [u64; 2],
}

/// Ground states keyed by `(d, p, N, R_max, tol)`, shared between sweep workers.
#[derive(Debug, Default, Clone)]
pub struct GroundStateCache {
    inner: Arc<Mutex<HashMap<CacheKey, Arc<GroundState>>>>,
}

impl GroundStateCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, grid: &RadialGrid, p: u32, gs: &GroundStateConfig) -> LabResult<Arc<GroundState>> {
        let key = CacheKey {
            dim: grid.dim().as_usize(),
            p,
            n: grid.len(),
            r_max: grid.r_max().to_bits(),
            tol: gs.tol.to_bits(),
            bracket: gs.bracket.map(f64::to_bits),
        };
        if let Some(q) = self.inner.lock().expect("cache lock").get(&key) {
            return Ok(q.clone());
        }
        // solved outside the lock; a concurrent duplicate solve yields the same result
        let q = Arc::new(solve_ground_state_with(grid, p, gs.tol, &gs.shooting())?);
        Ok(self.inner.lock().expect("cache lock").entry(key).or_insert(q).clone())
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `u0` and `u1` on the configured grid.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub u0: RadialField,
    pub u1: RadialField,
}

/// Read `r,u0,u1` rows; the radii must be the grid nodes.
pub fn read_data_file(path: &Path, grid: &RadialGrid) -> LabResult<InitialData> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| LabError::Format(format!("{}: {e}", path.display())))?;
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["r", "u0", "u1"] {
        return Err(LabError::Format(format!("{}: expected columns r,u0,u1", path.display())));
    }
    let mut u0 = Vec::with_capacity(grid.len());
    let mut u1 = Vec::with_capacity(grid.len());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |k: usize| -> LabResult<f64> {
            rec[k]
                .trim()
                .parse()
                .map_err(|_| LabError::Format(format!("{}: row {}: not a number", path.display(), i + 1)))
        };
        let r = num(0)?;
        match grid.nodes().get(i) {
            Some(&node) if (r - node).abs() <= 1e-9 * node.max(1.0) => {}
            _ => return Err(LabError::Format(format!("{}: row {} is not at grid node {}", path.display(), i + 1, i))),
        }
        u0.push(num(1)?);
        u1.push(num(2)?);
    }
    if u0.len() != grid.len() {
        return Err(LabError::Format(format!("{}: {} rows for {} grid nodes", path.display(), u0.len(), grid.len())));
    }
    Ok(InitialData { u0: RadialField::from_real(grid, &u0)?, u1: RadialField::from_real(grid, &u1)? })
}

/// A sum of Gaussian bumps with random centres, widths and signs, drawn from `seed`.
pub fn perturbation(grid: &RadialGrid, p: &PerturbationConfig, seed: u64) -> LabResult<RadialField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r_scale = 0.25 * grid.r_max();
    let bumps: Vec<(f64, f64, f64)> = (0..p.modes)
        .map(|_| {
            let a = p.amplitude * rng.gen_range(-1.0..=1.0);
            let c = rng.gen_range(0.0..r_scale);
            let w = rng.gen_range(1.0..3.0);
            (a, c, w)
        })
        .collect();
    Ok(RadialField::from_fn(grid, |r| bumps.iter().map(|&(a, c, w)| a * (-(r - c) * (r - c) / (w * w)).exp()).sum())?)
}

/// Build the initial data for `cfg`, with `lambda` overriding the scaled-ground-state family.
pub fn initial_data(
    cfg: &ExperimentConfig,
    grid: &RadialGrid,
    cache: &GroundStateCache,
    lambda: Option<f64>,
) -> LabResult<InitialData> {
    let mut data = match (&cfg.data, lambda) {
        (DataConfig::ScaledGroundState { lambda: fixed }, l) => {
            let l = l.unwrap_or(*fixed);
            let q = cache.get(grid, cfg.model.ground_state_power(), &cfg.ground_state)?;
            InitialData { u0: q.profile.scale(l), u1: RadialField::zeros(grid) }
        }
        (DataConfig::Gaussian { amplitude, width }, l) => {
            let a = amplitude * l.unwrap_or(1.0);
            let w = *width;
            InitialData {
                u0: RadialField::from_fn(grid, |r| a * (-r * r / (w * w)).exp())?,
                u1: RadialField::zeros(grid),
            }
        }
        (DataConfig::File { path }, _) => read_data_file(path, grid)?,
    };
    if cfg.perturbation.amplitude > 0.0 {
        data.u0 = data.u0.add(&perturbation(grid, &cfg.perturbation, cfg.seed)?)?;
    }
    Ok(data)
}
