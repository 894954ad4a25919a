//! Versioned file formats.
//!
//! * time series CSV (`qkg-timeseries/1`): one row per tracker sample with the
//!   columns of [`TIMESERIES_COLUMNS`]; missing values are empty cells.
//! * JSON manifests: every document carries a `schema` string and the full
//!   configuration it was produced from.
//! * trajectory JSON (`qkg-trajectory/1`): grid, spacing and the coefficients
//!   of `U` at the stored times, read back by the `norms` subcommand.
//!
//! Floats are written in shortest round-trip form, so identical runs give
//! identical bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qkg_core::evolution::{RunRecord, SimState, Trajectory};
use qkg_core::functionals::Nonlinearity;
use qkg_core::spectral::{besov_norm, BesovSpec, Dimension, RadialGrid, SpectralField};
use qkg_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

pub const TIMESERIES_SCHEMA: &str = "qkg-timeseries/1";
pub const TRAJECTORY_SCHEMA: &str = "qkg-trajectory/1";

pub const TIMESERIES_COLUMNS: [&str; 12] =
    ["t", "E", "H1", "ut_L2", "L2sq", "K10", "M", "L3", "windowed_cube", "besov_H1", "tail_fraction", "boundary_ratio"];

pub fn ensure_dir(dir: &Path) -> LabResult<()> {
    fs::create_dir_all(dir).map_err(LabError::io(dir))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> LabResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(LabError::io(path))
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Time series of a run. `besov_H1` is `‖u‖_{B^1_{2,2}}`, evaluated from the stored
/// states when they are available.
pub fn timeseries_csv(record: &RunRecord) -> LabResult<Vec<u8>> {
    let mut out = Vec::new();
    writeln!(out, "# schema: {TIMESERIES_SCHEMA}").expect("in-memory write");
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(TIMESERIES_COLUMNS)?;
        let spec = BesovSpec::single(0.5, 1.0);
        for (i, s) in record.samples.iter().enumerate() {
            let besov = match record.trajectory.states.get(i) {
                Some(st) if (st.t - s.t).abs() < 1e-9 && st.is_finite() => Some(besov_norm(&st.u(), &spec)?),
                _ => None,
            };
            w.write_record([
                cell(Some(s.t)),
                cell(Some(s.energy)),
                cell(Some(s.h1)),
                cell(Some(s.ut_l2)),
                cell(Some(s.l2_sq)),
                cell(Some(s.k10)),
                cell(s.morawetz),
                cell(Some(s.l3)),
                cell(s.local_cube),
                cell(besov),
                cell(Some(s.tail_fraction)),
                cell(Some(s.boundary_ratio)),
            ])?;
        }
        w.flush().map_err(|e| LabError::Format(e.to_string()))?;
    }
    Ok(out)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> LabResult<()> {
    fs::write(path, bytes).map_err(LabError::io(path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub schema: String,
    pub dim: usize,
    pub r_max: f64,
    pub n: usize,
    pub nonlinearity: String,
    /// Spacing of the stored times.
    pub dt: f64,
    pub times: Vec<f64>,
    /// `Re Û` per stored time.
    pub re: Vec<Vec<f64>>,
    /// `Im Û` per stored time.
    pub im: Vec<Vec<f64>>,
}

pub fn nonlinearity_name(nl: Nonlinearity) -> String {
    match nl {
        Nonlinearity::Free => "free".into(),
        Nonlinearity::Quadratic => "quadratic".into(),
        Nonlinearity::Power { p } => format!("power-{p}"),
        Nonlinearity::Phi4 => "phi4".into(),
    }
}

fn parse_nonlinearity(s: &str) -> LabResult<Nonlinearity> {
    Ok(match s {
        "free" => Nonlinearity::Free,
        "quadratic" => Nonlinearity::Quadratic,
        "phi4" => Nonlinearity::Phi4,
        other => match other.strip_prefix("power-").and_then(|p| p.parse().ok()) {
            Some(p) => Nonlinearity::power(p),
            None => return Err(LabError::Format(format!("unknown nonlinearity {other:?}"))),
        },
    })
}

impl TrajectoryFile {
    /// Every `stride`-th state of `traj`.
    pub fn from_trajectory(traj: &Trajectory, stride: usize) -> LabResult<Self> {
        let stride = stride.max(1);
        let Some(first) = traj.states.first() else {
            return Err(LabError::Format("empty trajectory".into()));
        };
        let g = first.grid();
        let states: Vec<&SimState> = traj.states.iter().step_by(stride).filter(|s| s.is_finite()).collect();
        Ok(TrajectoryFile {
            schema: TRAJECTORY_SCHEMA.into(),
            dim: g.dim().as_usize(),
            r_max: g.r_max(),
            n: g.len(),
            nonlinearity: nonlinearity_name(traj.nl),
            dt: traj.dt * stride as f64,
            times: states.iter().map(|s| s.t).collect(),
            re: states.iter().map(|s| s.u_hat.coeffs.iter().map(|c| c.re).collect()).collect(),
            im: states.iter().map(|s| s.u_hat.coeffs.iter().map(|c| c.im).collect()).collect(),
        })
    }

    pub fn to_trajectory(&self) -> LabResult<Trajectory> {
        if self.schema != TRAJECTORY_SCHEMA {
            return Err(LabError::Format(format!("expected schema {TRAJECTORY_SCHEMA}, found {}", self.schema)));
        }
        let d = Dimension::from_usize(self.dim).map_err(|e| LabError::Format(e.to_string()))?;
        let grid = RadialGrid::new(d, self.r_max, self.n).map_err(|e| LabError::Format(e.to_string()))?;
        if self.re.len() != self.times.len() || self.im.len() != self.times.len() {
            return Err(LabError::Format("times and coefficient rows differ in length".into()));
        }
        let mut states = Vec::with_capacity(self.times.len());
        for ((&t, re), im) in self.times.iter().zip(&self.re).zip(&self.im) {
            if re.len() != self.n || im.len() != self.n {
                return Err(LabError::Format(format!("row at t = {t} has the wrong length")));
            }
            let coeffs = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
            states.push(SimState { t, u_hat: SpectralField::new(&grid, coeffs)? });
        }
        Ok(Trajectory { nl: parse_nonlinearity(&self.nonlinearity)?, dt: self.dt, states })
    }

    pub fn read(path: &Path) -> LabResult<Self> {
        let text = fs::read_to_string(path).map_err(LabError::io(path))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// `dir/name`.
pub fn path_in(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// File-name tag for a sweep value, e.g. `0.800`.
pub fn lambda_tag(lambda: f64) -> String {
    format!("{lambda:.3}")
}
