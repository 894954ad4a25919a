//! Post-processing of stored trajectories: blow-up detection with the
//! convexity identity, `L³` decay windows, and scattering profiles.

use alloc::vec;
use alloc::vec::Vec;

use super::{SimState, Trajectory};
use crate::error::bail;
use crate::functionals::{energy, grad_sq, mass_sq, sign_functional_k, Nonlinearity, VariationalParams};
use crate::normalform::{boundary_term, AnalysisParams, BilinearEngine, DEFAULT_ANGLES};
use crate::quadrature::central_d2;
use crate::spectral::{half_wave_spectral, SpectralField};
use crate::{Complex64, Result};

/// Tail-energy share above which a state counts as under-resolved.
const TAIL_LIMIT: f64 = 1e-10;
/// Largest relative change of `‖u‖_{H¹}` between neighbouring samples of a resolved stretch.
const H1_JUMP: f64 = 0.05;

/// One point of the convexity check `y'' = 2(‖u_t‖² - K_{1,0}(u))`, `y = ‖u‖₂²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityPoint {
    pub t: f64,
    /// Five-point finite difference of `y`.
    pub fd: f64,
    pub rhs: f64,
    /// `|fd - rhs|` divided by the sum of the magnitudes of the terms in `rhs`.
    pub residual: f64,
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupReport {
    pub blew_up: bool,
    pub t_detect: Option<f64>,
    pub h1_growth: f64,
    pub convexity: Vec<ConvexityPoint>,
    /// Largest residual over resolved points (0 if there are none).
    pub max_resolved_residual: f64,
    pub resolved_points: usize,
}

struct Diag {
    y: f64,
    ut_sq: f64,
    h1_sq: f64,
    k10: f64,
    tail: f64,
}

fn diag(s: &SimState, nl: Nonlinearity) -> Diag {
    let u = s.u();
    let ut = s.ut();
    let y = mass_sq(&u);
    Diag {
        y,
        ut_sq: mass_sq(&ut),
        h1_sq: grad_sq(&u) + y,
        k10: sign_functional_k(&u, VariationalParams::default(), nl),
        tail: s.tail_fraction(),
    }
}

/// [`detect_blowup_with`] at the default factor `10³`.
pub fn detect_blowup(traj: &Trajectory) -> Result<BlowupReport> {
    detect_blowup_with(traj, 1e3)
}

/// Blow-up is declared at the first state that is non-finite or whose `‖u‖_{H¹}`
/// exceeds `factor` times the initial value. The convexity identity is checked
/// on the states before that. For the quadratic equation the right-hand side is
/// written as `5‖u_t‖² - 6E + ‖u‖_{H¹}²`, otherwise as `2(‖u_t‖² - K_{1,0}(u))`.
pub fn detect_blowup_with(traj: &Trajectory, factor: f64) -> Result<BlowupReport> {
    let n = traj.states.len();
    if n < 5 {
        bail!(Parameter, "blow-up detection needs at least 5 samples, got {n}");
    }
    let mut diags = Vec::with_capacity(n);
    let mut t_detect = None;
    let mut growth: f64 = 1.0;
    let mut h1_0 = 0.0;
    for (i, s) in traj.states.iter().enumerate() {
        if !s.is_finite() {
            t_detect = Some(s.t);
            growth = f64::INFINITY;
            break;
        }
        let d = diag(s, traj.nl);
        if i == 0 {
            h1_0 = libm::sqrt(d.h1_sq);
        } else if h1_0 > 0.0 {
            let g = libm::sqrt(d.h1_sq) / h1_0;
            growth = growth.max(g);
            if !(g <= factor) {
                diags.push(d);
                t_detect = Some(s.t);
                break;
            }
        }
        diags.push(d);
    }
    let e0 = {
        let s = &traj.states[0];
        energy(&s.u(), &s.ut(), traj.nl)?
    };
    let y: Vec<f64> = diags.iter().map(|d| d.y).collect();
    let mut convexity = Vec::new();
    let mut worst: f64 = 0.0;
    let mut resolved_points = 0;
    for i in 2..diags.len().saturating_sub(2) {
        let d = &diags[i];
        let fd = central_d2(&y, i, traj.dt);
        let (rhs, scale) = if traj.nl == Nonlinearity::Quadratic {
            (5.0 * d.ut_sq - 6.0 * e0 + d.h1_sq, 5.0 * d.ut_sq + 6.0 * e0.abs() + d.h1_sq)
        } else {
            (2.0 * (d.ut_sq - d.k10), 2.0 * (d.ut_sq + d.k10.abs()))
        };
        let residual = if scale > 0.0 { (fd - rhs).abs() / scale } else { (fd - rhs).abs() };
        let resolved = diags[i - 2..=i + 2].iter().all(|d| d.tail < TAIL_LIMIT)
            && diags[i - 2..=i + 2].windows(2).all(|w| (libm::sqrt(w[1].h1_sq / w[0].h1_sq) - 1.0).abs() < H1_JUMP);
        if resolved {
            resolved_points += 1;
            worst = worst.max(residual);
        }
        convexity.push(ConvexityPoint { t: traj.states[i].t, fd, rhs, residual, resolved });
    }
    Ok(BlowupReport {
        blew_up: t_detect.is_some(),
        t_detect,
        h1_growth: growth,
        convexity,
        max_resolved_residual: worst,
        resolved_points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct L3Report {
    pub t: Vec<f64>,
    /// `‖U(t)‖_{L³}`
    pub l3: Vec<f64>,
    pub tau: f64,
    /// End point `T₁` of the window `[T₁ - τ, T₁]` with the smallest sup, and that sup.
    pub best_window: Option<(f64, f64)>,
}

impl L3Report {
    /// Earliest `T₁` whose window sup is at most `eps`.
    pub fn first_window_below(&self, eps: f64) -> Option<f64> {
        self.windows().find(|&(_, s)| s <= eps).map(|(t1, _)| t1)
    }

    fn windows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mut lo = 0;
        (0..self.t.len()).filter_map(move |hi| {
            let t1 = self.t[hi];
            if t1 - self.t[0] < self.tau - 1e-12 {
                return None;
            }
            while self.t[lo] < t1 - self.tau - 1e-12 {
                lo += 1;
            }
            Some((t1, self.l3[lo..=hi].iter().copied().fold(0.0, f64::max)))
        })
    }
}

/// `‖U(t)‖_{L³}` along the trajectory and the window of length `tau` minimizing its sup.
pub fn l3_track(traj: &Trajectory, tau: f64) -> Result<L3Report> {
    if !(tau >= 0.0 && tau.is_finite()) {
        bail!(Parameter, "window length must be non-negative, got {tau}");
    }
    let t: Vec<f64> = traj.states.iter().map(|s| s.t).collect();
    let l3: Vec<f64> = traj.states.iter().map(|s| s.field().lebesgue_norm(1.0 / 3.0)).collect();
    let mut report = L3Report { t, l3, tau, best_window: None };
    report.best_window = report.windows().fold(None, |best: Option<(f64, f64)>, w| match best {
        Some(b) if b.1 <= w.1 => Some(b),
        _ => Some(w),
    });
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringReport {
    pub times: Vec<f64>,
    /// `v_n = K(-t_n)U(t_n)`.
    pub profiles: Vec<SpectralField>,
    /// `‖v_n - v_m‖_{H¹}`.
    pub cauchy: Vec<Vec<f64>>,
    /// `‖v_{n+1} - v_n‖_{H¹}`.
    pub consecutive: Vec<f64>,
    /// `‖¼ Σ_ι Ω_ι(U^{ι₁}, U^{ι₂})(t_n)‖_{H¹}`.
    pub omega_h1: Vec<f64>,
    /// Consecutive differences of the corrected profiles `K(-t_n)(U + iB)(t_n)`, `B = ¼⟨D⟩⁻¹ΣΩ`.
    pub corrected_consecutive: Vec<f64>,
    pub threshold: f64,
    /// Consecutive differences decrease and all lie below `threshold`.
    pub scattered: bool,
    /// `v` at the last sample time.
    pub u_plus: SpectralField,
}

fn diff_h1(a: &SpectralField, b: &SpectralField) -> f64 {
    let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
    SpectralField { grid: a.grid.clone(), coeffs }.sobolev_norm(1.0)
}

/// Pull the states at `times` back by the free flow and test the limit for convergence.
pub fn scattering_extract(
    traj: &Trajectory,
    times: &[f64],
    params: &AnalysisParams,
    threshold: f64,
) -> Result<ScatteringReport> {
    if times.len() < 3 {
        bail!(Parameter, "scattering extraction needs at least 3 sample times, got {}", times.len());
    }
    let Some(last) = traj.states.last() else {
        bail!(Parameter, "empty trajectory");
    };
    let t_last = last.t;
    let mut picked = Vec::with_capacity(times.len());
    for &t in times {
        if t < 0.5 * t_last - 1e-9 || t > t_last + 1e-9 {
            bail!(Parameter, "sample time {t} is outside the tail half [{}, {t_last}]", 0.5 * t_last);
        }
        let s = traj
            .states
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .filter(|s| (s.t - t).abs() <= 0.5 * traj.dt + 1e-9);
        match s {
            Some(s) if s.is_finite() => picked.push(s),
            Some(_) => bail!(Numeric, "state at t = {t} is not finite"),
            None => bail!(Parameter, "no stored state near t = {t}"),
        }
    }
    let engine = BilinearEngine::new(last.grid(), DEFAULT_ANGLES)?;
    let mut profiles = Vec::new();
    let mut corrected = Vec::new();
    let mut omega_h1 = Vec::new();
    for s in &picked {
        profiles.push(half_wave_spectral(&s.u_hat, -s.t));
        let b = boundary_term(&engine, &s.u_hat, params)?;
        omega_h1.push(b.sobolev_norm(2.0));
        let coeffs = s.u_hat.coeffs.iter().zip(&b.coeffs).map(|(u, b)| u + Complex64::i() * b).collect();
        corrected.push(half_wave_spectral(&SpectralField { grid: b.grid.clone(), coeffs }, -s.t));
    }
    let k = profiles.len();
    let mut cauchy = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = diff_h1(&profiles[i], &profiles[j]);
            cauchy[i][j] = d;
            cauchy[j][i] = d;
        }
    }
    let consecutive: Vec<f64> = (1..k).map(|i| cauchy[i - 1][i]).collect();
    let corrected_consecutive = (1..k).map(|i| diff_h1(&corrected[i - 1], &corrected[i])).collect();
    let scattered = consecutive.windows(2).all(|w| w[1] < w[0]) && consecutive.iter().all(|&d| d < threshold);
    Ok(ScatteringReport {
        times: picked.iter().map(|s| s.t).collect(),
        u_plus: profiles[k - 1].clone(),
        profiles,
        cauchy,
        consecutive,
        omega_h1,
        corrected_consecutive,
        threshold,
        scattered,
    })
}
