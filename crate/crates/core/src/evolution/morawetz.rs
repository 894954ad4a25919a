//! Localized Morawetz quantity `M(t) = -∫u_t(Ψ·∇u + ½ div Ψ u) dx` with
//! `Ψ = φ(r) x/r` and `φ(r) = ∫₀^r χ_R²`.

use alloc::vec::Vec;

use super::{SimState, Trajectory};
use crate::cutoff::chi_derivs;
use crate::error::bail;
use crate::functionals::Nonlinearity;
use crate::quadrature::{central_d1, gauss_legendre};
use crate::spectral::{Dimension, RadialGrid};
use crate::Result;

const PHI_NODES: usize = 48;

/// The radial profiles entering the Morawetz identity for cutoff radius `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct MorawetzWeights {
    pub radius: f64,
    dim: Dimension,
    gl: (Vec<f64>, Vec<f64>),
}

impl MorawetzWeights {
    /// Needs `0 < R ≤ r_max/2` so that the whole transition layer `[R, 2R]` lies on the grid.
    pub fn new(dim: Dimension, radius: f64, r_max: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            bail!(Parameter, "Morawetz radius must be positive, got {radius}");
        }
        if radius > 0.5 * r_max {
            bail!(Parameter, "Morawetz radius {radius} exceeds half the domain ({})", 0.5 * r_max);
        }
        Ok(MorawetzWeights { radius, dim, gl: gauss_legendre(PHI_NODES, 0.0, 1.0) })
    }

    /// `(χ_R, χ_R', χ_R'')` at `r`.
    pub fn chi_r(&self, r: f64) -> (f64, f64, f64) {
        let (c, d1, d2) = chi_derivs(r / self.radius);
        (c, d1 / self.radius, d2 / (self.radius * self.radius))
    }

    /// `φ(r)`.
    pub fn phi(&self, r: f64) -> f64 {
        let big_r = self.radius;
        if r <= big_r {
            return r;
        }
        let top = r.min(2.0 * big_r);
        let len = top - big_r;
        let layer: f64 = self
            .gl
            .0
            .iter()
            .zip(&self.gl.1)
            .map(|(x, w)| {
                let c = self.chi_r(big_r + len * x).0;
                w * c * c
            })
            .sum();
        big_r + len * layer
    }

    /// `(φ, φ', φ'', φ''')` at `r`.
    pub fn phi_derivs(&self, r: f64) -> (f64, f64, f64, f64) {
        let (c, c1, c2) = self.chi_r(r);
        (self.phi(r), c * c, 2.0 * c * c1, 2.0 * (c1 * c1 + c * c2))
    }

    /// `div Ψ = φ' + (d-1)φ/r`.
    pub fn div_psi(&self, r: f64) -> f64 {
        let d = self.dim.as_f64();
        let (p, p1, _, _) = self.phi_derivs(r);
        p1 + (d - 1.0) * p / r
    }

    /// `Δ div Ψ = φ''' + 2(d-1)φ''/r - (d-1)(d-3)/r² (φ/r - φ')`.
    pub fn lap_div_psi(&self, r: f64) -> f64 {
        let d = self.dim.as_f64();
        let (p, p1, p2, p3) = self.phi_derivs(r);
        p3 + 2.0 * (d - 1.0) * p2 / r - (d - 1.0) * (d - 3.0) / (r * r) * (p / r - p1)
    }

    /// `q = ½ div Ψ`.
    pub fn q(&self, r: f64) -> f64 {
        0.5 * self.div_psi(r)
    }

    pub(crate) fn profiles(&self, grid: &RadialGrid) -> Profiles {
        let mut p = Profiles {
            phi: Vec::with_capacity(grid.len()),
            dphi: Vec::with_capacity(grid.len()),
            div: Vec::with_capacity(grid.len()),
            lap_div: Vec::with_capacity(grid.len()),
            inside: Vec::with_capacity(grid.len()),
            weights: grid.weights().to_vec(),
        };
        for &r in grid.nodes() {
            let (f, f1, _, _) = self.phi_derivs(r);
            p.phi.push(f);
            p.dphi.push(f1);
            p.div.push(self.div_psi(r));
            p.lap_div.push(self.lap_div_psi(r));
            p.inside.push(r <= self.radius);
        }
        p
    }
}

/// The weights tabulated on a grid.
#[derive(Debug, Clone)]
pub(crate) struct Profiles {
    phi: Vec<f64>,
    dphi: Vec<f64>,
    div: Vec<f64>,
    lap_div: Vec<f64>,
    inside: Vec<bool>,
    weights: Vec<f64>,
}

pub(crate) struct MorawetzSample {
    pub m: f64,
    pub rhs: f64,
    pub scale: f64,
    pub local_cube: f64,
}

impl Profiles {
    /// `M`, the identity right-hand side `∫φ'u_r² - ¼∫Δdiv Ψ u² + ∫div Ψ (F(u) - ½u f(u))`,
    /// the sum of the magnitudes of those three terms, and `∫_{|x|≤R}|u|³`.
    pub(crate) fn evaluate(&self, state: &SimState, nl: Nonlinearity) -> MorawetzSample {
        let u = state.u().re();
        let ut = state.ut().re();
        let ur = state.u_r();
        let (mut m, mut t1, mut t2, mut t3, mut a2, mut a3, mut cube) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..u.len() {
            let w = self.weights[i];
            m -= w * ut[i] * (self.phi[i] * ur[i] + 0.5 * self.div[i] * u[i]);
            t1 += w * self.dphi[i] * ur[i] * ur[i];
            let l = -0.25 * w * self.lap_div[i] * u[i] * u[i];
            t2 += l;
            a2 += l.abs();
            let g = w * self.div[i] * (nl.antiderivative(u[i]) - 0.5 * u[i] * nl.f(u[i]));
            t3 += g;
            a3 += g.abs();
            if self.inside[i] {
                let a = u[i].abs();
                cube += w * a * a * a;
            }
        }
        MorawetzSample { m, rhs: t1 + t2 + t3, scale: t1 + a2 + a3, local_cube: cube }
    }
}

/// `∫_T^{2T}∫_{|x|≤R}|u|³` against the scale `R + T R^{-3/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeWindow {
    pub t_lo: f64,
    pub t_hi: f64,
    pub integral: f64,
    pub bound_scale: f64,
    /// `integral / bound_scale`: the constant the estimate needs on this window.
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorawetzReport {
    pub radius: f64,
    pub t: Vec<f64>,
    pub m: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `|∂_t M - rhs| / scale` at interior samples (the first and last two are `NaN`).
    pub residual: Vec<f64>,
    pub local_cube: Vec<f64>,
    /// `max |M| / R`.
    pub m_constant: f64,
    pub max_residual: f64,
    pub windows: Vec<CubeWindow>,
}

/// Integral of the piecewise-linear interpolant of `(t, y)` over `[a, b]`.
fn window_integral(t: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    let mut s = 0.0;
    for i in 1..t.len() {
        let (t0, t1) = (t[i - 1], t[i]);
        let lo = t0.max(a);
        let hi = t1.min(b);
        if hi <= lo {
            continue;
        }
        let at = |x: f64| y[i - 1] + (y[i] - y[i - 1]) * (x - t0) / (t1 - t0);
        s += 0.5 * (hi - lo) * (at(lo) + at(hi));
    }
    s
}

/// Evaluate `M(t)`, check its derivative against the identity, and integrate
/// the local cube over the dyadic windows `[T, 2T]` with `T = t_end/2^k ≥ 1`.
pub fn morawetz_track(traj: &Trajectory, radius: f64) -> Result<MorawetzReport> {
    let first = match traj.states.first() {
        Some(s) => s,
        None => bail!(Parameter, "empty trajectory"),
    };
    let grid = first.grid();
    if grid.dim() != Dimension::Four {
        bail!(Parameter, "Morawetz tracking is implemented for d = 4");
    }
    let weights = MorawetzWeights::new(grid.dim(), radius, grid.r_max())?;
    let prof = weights.profiles(grid);
    let n = traj.states.len();
    let mut t = Vec::with_capacity(n);
    let mut m = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    let mut scale = Vec::with_capacity(n);
    let mut cube = Vec::with_capacity(n);
    for s in &traj.states {
        let v = prof.evaluate(s, traj.nl);
        t.push(s.t);
        m.push(v.m);
        rhs.push(v.rhs);
        scale.push(v.scale);
        cube.push(v.local_cube);
    }
    let mut residual = alloc::vec![f64::NAN; n];
    let mut max_residual: f64 = 0.0;
    for i in 2..n.saturating_sub(2) {
        let fd = central_d1(&m, i, traj.dt);
        let r = if scale[i] > 0.0 { (fd - rhs[i]).abs() / scale[i] } else { (fd - rhs[i]).abs() };
        residual[i] = r;
        max_residual = max_residual.max(r);
    }
    let m_constant = m.iter().map(|x| x.abs()).fold(0.0, f64::max) / radius;
    let mut windows = Vec::new();
    if let Some(&t_end) = t.last() {
        let mut big_t = 0.5 * t_end;
        while big_t >= 1.0 && big_t >= 4.0 * traj.dt {
            let integral = window_integral(&t, &cube, big_t, 2.0 * big_t);
            let bound_scale = radius + big_t * libm::pow(radius, -1.5);
            windows.push(CubeWindow {
                t_lo: big_t,
                t_hi: 2.0 * big_t,
                integral,
                bound_scale,
                constant: integral / bound_scale,
            });
            big_t *= 0.5;
        }
    }
    Ok(MorawetzReport { radius, t, m, rhs, residual, local_cube: cube, m_constant, max_residual, windows })
}
