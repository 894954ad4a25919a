//! Time integration of `U_t = i⟨D⟩U - i⟨D⟩⁻¹f_eff(u)`, `U = u - i⟨D⟩⁻¹u_t`,
//! and the diagnostics tracked along a run.
//!
//! The state is kept as transform coefficients `Û`. Since the transform
//! matrices are real, `u = Re U` has coefficients `Re Û` and
//! `û_t = -⟨ρ⟩ Im Û`.

mod morawetz;
mod trackers;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::bail;
use crate::functionals::{energy, grad_sq, mass_sq, sign_functional_k, Nonlinearity, VariationalParams};
use crate::spectral::{japanese, RadialField, RadialGrid, SpectralField};
use crate::{Complex64, Result};

pub use morawetz::{morawetz_track, CubeWindow, MorawetzReport, MorawetzWeights};
pub use trackers::{
    detect_blowup, detect_blowup_with, l3_track, scattering_extract, BlowupReport, ConvexityPoint, L3Report,
    ScatteringReport,
};

/// First-order state `U = u - i⟨D⟩⁻¹u_t` at time `t`, stored as coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub u_hat: SpectralField,
}

impl SimState {
    /// Build `U` from `(u, u_t)` at `t = 0`. Imaginary parts of the inputs are ignored.
    pub fn from_data(u0: &RadialField, u1: &RadialField) -> Result<Self> {
        u0.grid.check_same(&u1.grid)?;
        let g = &u0.grid;
        let n = g.len();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        g.forward_real(&u0.re(), &mut a);
        g.forward_real(&u1.re(), &mut b);
        let coeffs =
            g.freqs().iter().zip(a.iter().zip(&b)).map(|(&k, (&x, &y))| Complex64::new(x, -y / japanese(k))).collect();
        Ok(SimState { t: 0.0, u_hat: SpectralField { grid: g.clone(), coeffs } })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.u_hat.grid
    }

    /// `U` in space.
    pub fn field(&self) -> RadialField {
        crate::spectral::inverse_transform(&self.u_hat)
    }

    /// `u = Re U`.
    pub fn u(&self) -> RadialField {
        let g = self.grid();
        let re: Vec<f64> = self.u_hat.coeffs.iter().map(|c| c.re).collect();
        let mut out = vec![0.0; g.len()];
        g.inverse_real(&re, &mut out);
        RadialField::from_real(g, &out).unwrap_or_else(|_| RadialField::zeros(g))
    }

    /// `u_t = -⟨D⟩ Im U`.
    pub fn ut(&self) -> RadialField {
        let g = self.grid();
        let c: Vec<f64> = g.freqs().iter().zip(&self.u_hat.coeffs).map(|(&k, c)| -japanese(k) * c.im).collect();
        let mut out = vec![0.0; g.len()];
        g.inverse_real(&c, &mut out);
        RadialField::from_real(g, &out).unwrap_or_else(|_| RadialField::zeros(g))
    }

    /// `∂_r u` at the nodes.
    pub fn u_r(&self) -> Vec<f64> {
        let g = self.grid();
        let re: Vec<f64> = self.u_hat.coeffs.iter().map(|c| c.re).collect();
        let mut out = vec![0.0; g.len()];
        g.derivative_real(&re, &mut out);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.u_hat.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Share of `‖U‖_{H¹}²` carried by the top tenth of the frequency grid.
    pub fn tail_fraction(&self) -> f64 {
        let g = self.grid();
        let cut = g.len() - g.len() / 10;
        let mut total = 0.0;
        let mut tail = 0.0;
        for (m, ((w, &k), c)) in g.freq_weights().iter().zip(g.freqs()).zip(&self.u_hat.coeffs).enumerate() {
            let e = w * (1.0 + k * k) * c.norm_sqr();
            total += e;
            if m >= cut {
                tail += e;
            }
        }
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    }
}

/// States sampled at a uniform spacing `dt` together with the equation they solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub nl: Nonlinearity,
    pub dt: f64,
    pub states: Vec<SimState>,
}

/// Lawson (interaction-picture) RK4 stepper with precomputed phases.
pub struct Stepper {
    grid: RadialGrid,
    nl: Nonlinearity,
    dt: f64,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    inv_jb: Vec<f64>,
    re: Vec<f64>,
    u: Vec<f64>,
    f: Vec<f64>,
    fh: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: &RadialGrid, nl: Nonlinearity, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            bail!(Parameter, "time step must be positive, got {dt}");
        }
        let n = grid.len();
        let jb: Vec<f64> = grid.freqs().iter().map(|&k| japanese(k)).collect();
        Ok(Stepper {
            grid: grid.clone(),
            nl,
            dt,
            full: jb.iter().map(|&w| Complex64::from_polar(1.0, dt * w)).collect(),
            half: jb.iter().map(|&w| Complex64::from_polar(1.0, 0.5 * dt * w)).collect(),
            inv_jb: jb.iter().map(|w| 1.0 / w).collect(),
            re: vec![0.0; n],
            u: vec![0.0; n],
            f: vec![0.0; n],
            fh: vec![0.0; n],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `N(Û) = -i⟨ρ⟩⁻¹ F[f_eff(B Re Û)]`.
    fn rhs(&mut self, v: &[Complex64], out: &mut [Complex64]) {
        if self.nl == Nonlinearity::Free {
            out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
            return;
        }
        for (r, c) in self.re.iter_mut().zip(v) {
            *r = c.re;
        }
        self.grid.inverse_real(&self.re, &mut self.u);
        for (f, &u) in self.f.iter_mut().zip(&self.u) {
            *f = self.nl.effective(u);
        }
        self.grid.forward_real(&self.f, &mut self.fh);
        for ((o, &x), &w) in out.iter_mut().zip(&self.fh).zip(&self.inv_jb) {
            *o = Complex64::new(0.0, -x * w);
        }
    }

    /// Advance `Û` in place by one step.
    pub fn advance(&mut self, v: &mut [Complex64]) {
        let n = v.len();
        let h = self.dt;
        let zero = Complex64::new(0.0, 0.0);
        let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
        let mut w = vec![zero; n];
        self.rhs(v, &mut k1);
        for i in 0..n {
            w[i] = self.half[i] * (v[i] + k1[i] * (0.5 * h));
        }
        self.rhs(&w, &mut k2);
        for i in 0..n {
            w[i] = self.half[i] * v[i] + k2[i] * (0.5 * h);
        }
        self.rhs(&w, &mut k3);
        for i in 0..n {
            w[i] = self.full[i] * v[i] + self.half[i] * k3[i] * h;
        }
        self.rhs(&w, &mut k4);
        for i in 0..n {
            v[i] =
                self.full[i] * v[i] + (self.full[i] * k1[i] + self.half[i] * (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
}

/// One Lawson RK4 step. Overflow shows up as non-finite coefficients
/// (see [`SimState::is_finite`]), not as an error.
pub fn step(state: &SimState, dt: f64, nl: Nonlinearity) -> Result<SimState> {
    let mut s = Stepper::new(state.grid(), nl, dt)?;
    let mut v = state.u_hat.coeffs.clone();
    s.advance(&mut v);
    Ok(SimState { t: state.t + dt, u_hat: SpectralField { grid: state.grid().clone(), coeffs: v } })
}

/// Sampling and stopping rules of [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trackers {
    /// Diagnostics are recorded every `stride` steps.
    pub stride: usize,
    /// Keep the full state at every sample (needed by the post-processing trackers).
    pub keep_states: bool,
    /// Blow-up is declared when `‖u‖_{H¹}` exceeds this multiple of its initial value.
    pub blowup_factor: f64,
    /// Runs stop when `max |u|` over the outer 5% of the domain exceeds this
    /// fraction of `max |u|`.
    pub boundary_tol: f64,
    /// Record the Morawetz quantity with this cutoff radius (`d = 4`).
    pub morawetz_radius: Option<f64>,
}

impl Default for Trackers {
    fn default() -> Self {
        Trackers { stride: 10, keep_states: true, blowup_factor: 1e3, boundary_tol: 1e-6, morawetz_radius: None }
    }
}

/// Diagnostics at one sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub energy: f64,
    /// `‖u‖_{H¹}`
    pub h1: f64,
    /// `‖u_t‖₂`
    pub ut_l2: f64,
    /// `y = ‖u‖₂²`
    pub l2_sq: f64,
    pub k10: f64,
    /// `‖U‖_{L³}`
    pub l3: f64,
    pub morawetz: Option<f64>,
    /// `∫_{|x|≤R} |u|³ dx`
    pub local_cube: Option<f64>,
    pub tail_fraction: f64,
    pub boundary_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunVerdict {
    Scattered,
    BlewUp,
    Undetermined,
}

/// Everything a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub nl: Nonlinearity,
    pub dt: f64,
    pub t_end: f64,
    pub trackers: Trackers,
    pub samples: Vec<Sample>,
    /// States at every sample when `keep_states` is set.
    pub trajectory: Trajectory,
    pub final_state: SimState,
    pub blowup_time: Option<f64>,
    /// Time at which boundary contamination stopped the run.
    pub boundary_abort: Option<f64>,
    pub verdict: RunVerdict,
}

impl RunRecord {
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.samples.first().map_or(0.0, |s| s.energy);
        self.samples.iter().map(|s| (s.energy - e0).abs()).fold(0.0, f64::max)
    }
}

fn boundary_ratio(u: &RadialField) -> f64 {
    let n = u.values.len();
    let start = n - (n / 20).max(1);
    let edge = u.values[start..].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let peak = u.max_abs();
    if peak > 0.0 {
        edge / peak
    } else {
        0.0
    }
}

fn sample(state: &SimState, nl: Nonlinearity, weights: Option<&morawetz::Profiles>) -> Result<Sample> {
    let u = state.u();
    let ut = state.ut();
    let e = energy(&u, &ut, nl)?;
    let (m, cube) = match weights {
        Some(w) => {
            let v = w.evaluate(state, nl);
            (Some(v.m), Some(v.local_cube))
        }
        None => (None, None),
    };
    Ok(Sample {
        t: state.t,
        energy: e,
        h1: libm::sqrt(grad_sq(&u) + mass_sq(&u)),
        ut_l2: libm::sqrt(mass_sq(&ut)),
        l2_sq: mass_sq(&u),
        k10: sign_functional_k(&u, VariationalParams::default(), nl),
        l3: state.field().lebesgue_norm(1.0 / 3.0),
        morawetz: m,
        local_cube: cube,
        tail_fraction: state.tail_fraction(),
        boundary_ratio: boundary_ratio(&u),
    })
}

/// Run from `(u0, u1)` to `t_end` (or until blow-up / boundary contamination).
pub fn evolve(
    u0: &RadialField,
    u1: &RadialField,
    nl: Nonlinearity,
    t_end: f64,
    dt: f64,
    trackers: &Trackers,
) -> Result<RunRecord> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        bail!(Parameter, "t_end must be positive, got {t_end}");
    }
    if trackers.stride == 0 {
        bail!(Parameter, "tracker stride must be at least 1");
    }
    let grid = u0.grid.clone();
    let profiles = match trackers.morawetz_radius {
        Some(r) => Some(MorawetzWeights::new(grid.dim(), r, grid.r_max())?.profiles(&grid)),
        None => None,
    };
    let mut state = SimState::from_data(u0, u1)?;
    let mut stepper = Stepper::new(&grid, nl, dt)?;
    let steps = libm::round(t_end / dt) as usize;
    if steps == 0 {
        bail!(Parameter, "t_end is shorter than one step");
    }
    let first = sample(&state, nl, profiles.as_ref())?;
    let h1_0 = first.h1;
    let mut samples = vec![first];
    let mut states = if trackers.keep_states { vec![state.clone()] } else { vec![] };
    let mut blowup_time = None;
    let mut boundary_abort = None;
    let mut coeffs = state.u_hat.coeffs.clone();
    for i in 1..=steps {
        stepper.advance(&mut coeffs);
        let t = i as f64 * dt;
        let finite = coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            blowup_time = Some(t);
            if trackers.keep_states {
                // recorded so that post-processing sees the overflow signal
                states.push(SimState { t, u_hat: SpectralField { grid: grid.clone(), coeffs: coeffs.clone() } });
            }
            break;
        }
        if i % trackers.stride != 0 && i != steps {
            continue;
        }
        state = SimState { t, u_hat: SpectralField { grid: grid.clone(), coeffs: coeffs.clone() } };
        let s = sample(&state, nl, profiles.as_ref())?;
        if trackers.keep_states && i % trackers.stride == 0 {
            states.push(state.clone());
        }
        let exploded = !s.h1.is_finite() || (h1_0 > 0.0 && s.h1 > trackers.blowup_factor * h1_0);
        let contaminated = s.boundary_ratio > trackers.boundary_tol;
        samples.push(s);
        if exploded {
            blowup_time = Some(t);
            break;
        }
        if contaminated {
            boundary_abort = Some(t);
            break;
        }
    }
    if blowup_time.is_none() {
        state = SimState { t: samples.last().unwrap().t, u_hat: SpectralField { grid: grid.clone(), coeffs } };
    }
    let verdict = if blowup_time.is_some() { RunVerdict::BlewUp } else { RunVerdict::Undetermined };
    Ok(RunRecord {
        nl,
        dt,
        t_end,
        trackers: trackers.clone(),
        samples,
        trajectory: Trajectory { nl, dt: dt * trackers.stride as f64, states },
        final_state: state,
        blowup_time,
        boundary_abort,
        verdict,
    })
}
