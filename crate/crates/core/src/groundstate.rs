//! Ground state `Q` of `-ΔQ + Q = Q^{p+1}` by shooting on the central value.
//!
//! The radial ODE `Q'' + (d-1)/r Q' = Q - Q^{p+1}` is integrated from a Taylor
//! start near the origin. For `b = Q(0)` above the ground-state value the
//! solution crosses zero; below it the solution turns around (`Q' > 0`) and
//! oscillates about the constant state. Bisection on `b` separates the two.

use alloc::vec::Vec;

use crate::error::bail;
use crate::functionals::{energy, grad_sq, integral_of, mass_sq, stationary_energy_j, Nonlinearity};
use crate::ode::Dopri5;
use crate::special::bessel_k;
use crate::spectral::{Dimension, RadialField, RadialGrid};
use crate::Result;

const R0: f64 = 1e-6;
/// Q/b below which the profile is replaced by the matched tail.
const MATCH_LEVEL: f64 = 1e-6;

/// Outcome of a single shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `Q` became negative: `b` is above the ground-state value.
    Crossing,
    /// `Q' > 0` before crossing zero: `b` is below the ground-state value.
    TurnAround,
}

/// Shooting and bisection settings.
#[derive(Debug, Clone, Copy)]
pub struct ShootingOptions {
    /// Tolerance of the ODE integrator.
    pub ode_tol: f64,
    /// Initial bracket for `b`.
    pub bracket: (f64, f64),
    /// Geometric widening of the upper end stops here.
    pub b_limit: f64,
    /// Radius beyond which a shot without an event counts as `TurnAround`.
    pub r_cap: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions { ode_tol: 1e-12, bracket: (1.0, 10.0), b_limit: 1e4, r_cap: 200.0 }
    }
}

/// `‖Q‖₂²`, `‖∇Q‖₂²`, `‖Q‖_{p+2}^{p+2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateNorms {
    pub mass_sq: f64,
    pub grad_sq: f64,
    pub pot_int: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub profile: RadialField,
    pub dim: Dimension,
    pub p: u32,
    pub b_star: f64,
    /// Final width of the bisection bracket.
    pub b_width: f64,
    pub bisection_steps: usize,
    /// Beyond this radius the profile is the matched linear tail.
    pub r_match: f64,
    pub norms: GroundStateNorms,
    pub j_q: f64,
    pub e_q0: f64,
}

/// Relative residuals of the exact ground-state identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// `(‖Q‖_{H¹}² - ‖Q‖_{p+2}^{p+2}) / ‖Q‖_{p+2}^{p+2}`
    pub energy_identity: f64,
    /// `((d-2)/2 ‖∇Q‖² + d/2 ‖Q‖² - d/(p+2) ‖Q‖_{p+2}^{p+2}) / ‖Q‖_{p+2}^{p+2}`
    pub pohozaev: f64,
    /// `(∫Q^{2(d+2)/d} - (d+2)/d ‖∇Q‖²) / ∫Q^{2(d+2)/d}` when `p = 4/d`
    pub gn_equality: Option<f64>,
    /// `(J(Q) - E(Q,0)) / E(Q,0)`
    pub j_minus_e: f64,
    /// `(E(Q,0) - ½‖Q‖₂²) / ‖Q‖₂²` for `d = 4`, `p = 1`
    pub half_mass: Option<f64>,
}

impl IdentityReport {
    pub fn max_abs(&self) -> f64 {
        [Some(self.energy_identity), Some(self.pohozaev), self.gn_equality, Some(self.j_minus_e), self.half_mass]
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Both sides of the sharp Gagliardo–Nirenberg inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Relative slack allowed by [`verify_gn`].
pub const GN_TOL: f64 = 1e-6;

fn rhs(d: f64, p: u32) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |r, y| {
        let q = y[0];
        let f = q * libm::pow(q.abs(), p as f64);
        [y[1], -(d - 1.0) / r * y[1] + q - f]
    }
}

fn taylor_start(d: f64, p: u32, b: f64) -> [f64; 2] {
    let c = (b - libm::pow(b, (p + 1) as f64)) / d;
    [b + 0.5 * c * R0 * R0, c * R0]
}

/// Shoot from `Q(0) = b` and classify the trajectory.
pub fn shoot(d: Dimension, p: u32, b: f64, opts: &ShootingOptions) -> Result<Branch> {
    let df = d.as_f64();
    let sol = Dopri5::new(opts.ode_tol)
        .integrate(rhs(df, p), R0, taylor_start(df, p, b), &[opts.r_cap], |_, y| y[0] < 0.0 || y[1] > 0.0)?;
    Ok(if sol.halted && sol.y_end[0] < 0.0 { Branch::Crossing } else { Branch::TurnAround })
}

/// Decaying solution of the linearised equation `-ΔQ + Q = 0`.
fn tail(d: Dimension, r: f64) -> f64 {
    match d {
        Dimension::One => libm::exp(-r),
        Dimension::Three => libm::exp(-r) / r,
        Dimension::Four => bessel_k(1.0, r) / r,
    }
}

/// Solve for `Q` on the nodes of `grid` with default shooting options.
/// `tol` bounds the relative residuals of the ground-state identities.
pub fn solve_ground_state(grid: &RadialGrid, p: u32, tol: f64) -> Result<GroundState> {
    solve_ground_state_with(grid, p, tol, &ShootingOptions::default())
}

pub fn solve_ground_state_with(grid: &RadialGrid, p: u32, tol: f64, opts: &ShootingOptions) -> Result<GroundState> {
    if p < 1 {
        bail!(Parameter, "power must be at least 1");
    }
    if !(tol > 0.0) {
        bail!(Parameter, "tolerance must be positive");
    }
    let d = grid.dim();
    let (mut lo, mut hi) = opts.bracket;
    if !(lo > 0.0 && hi > lo) {
        bail!(Parameter, "invalid bracket [{lo}, {hi}]");
    }
    if shoot(d, p, lo, opts)? != Branch::TurnAround {
        bail!(Convergence, "lower end b = {lo} does not turn around");
    }
    while shoot(d, p, hi, opts)? != Branch::Crossing {
        lo = hi;
        hi *= 2.0;
        if hi > opts.b_limit {
            bail!(Convergence, "no crossing branch found for b up to {}", opts.b_limit);
        }
    }
    let mut steps = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        steps += 1;
        match shoot(d, p, mid, opts)? {
            Branch::Crossing => hi = mid,
            Branch::TurnAround => lo = mid,
        }
    }
    let b_star = 0.5 * (lo + hi);

    // the two bracketing trajectories agree up to where they separate
    let df = d.as_f64();
    let ode = Dopri5::new(opts.ode_tol);
    let nodes = grid.nodes();
    let stop = |_: f64, y: &[f64; 2]| y[0] < 0.0 || y[1] > 0.0;
    let a = ode.integrate(rhs(df, p), R0, taylor_start(df, p, lo), nodes, stop)?;
    let b = ode.integrate(rhs(df, p), R0, taylor_start(df, p, hi), nodes, stop)?;
    let reach = a.samples.len().min(b.samples.len());
    let sep_tol = 1e-10 * b_star;
    let mut matched = 0;
    for i in 0..reach {
        let (qa, qb) = (a.samples[i][0], b.samples[i][0]);
        // past this level the linear tail is exact to O(Q) and the shooting
        // instability has not yet amplified integration error
        if (qa - qb).abs() > sep_tol || qa.min(qb) < MATCH_LEVEL * b_star {
            break;
        }
        matched = i + 1;
    }
    if matched == 0 {
        bail!(Resolution, "grid has no node before the shooting trajectories separate");
    }
    let im = matched - 1;
    let q_match = 0.5 * (a.samples[im][0] + b.samples[im][0]);
    let t_match = tail(d, nodes[im]);
    let values: Vec<f64> = (0..nodes.len())
        .map(|i| {
            if i < matched {
                0.5 * (a.samples[i][0] + b.samples[i][0])
            } else {
                q_match * tail(d, nodes[i]) / t_match
            }
        })
        .collect();
    let last = *values.last().unwrap();
    if last > tol * b_star {
        bail!(Resolution, "Q at the outer boundary is {last:e}; enlarge r_max");
    }
    let profile = RadialField::from_real(grid, &values)?;
    let nl = Nonlinearity::power(p);
    let norms = GroundStateNorms {
        mass_sq: mass_sq(&profile),
        grad_sq: grad_sq(&profile),
        pot_int: integral_of(&profile, |v| libm::pow(v, (p + 2) as f64)),
    };
    let zero = RadialField::zeros(grid);
    let gs = GroundState {
        j_q: stationary_energy_j(&profile, nl),
        e_q0: energy(&profile, &zero, nl)?,
        profile,
        dim: d,
        p,
        b_star,
        b_width: hi - lo,
        bisection_steps: steps,
        r_match: nodes[im],
        norms,
    };
    let report = ground_state_report(&gs);
    if report.max_abs() > tol {
        bail!(Resolution, "ground-state identities hold only to {:e} at this resolution", report.max_abs());
    }
    Ok(gs)
}

/// Residuals of the energy, Pohozaev and Gagliardo–Nirenberg identities.
pub fn ground_state_report(q: &GroundState) -> IdentityReport {
    let d = q.dim.as_f64();
    let p = q.p as f64;
    let n = q.norms;
    let energy_identity = (n.grad_sq + n.mass_sq - n.pot_int) / n.pot_int;
    let pohozaev = (0.5 * (d - 2.0) * n.grad_sq + 0.5 * d * n.mass_sq - d / (p + 2.0) * n.pot_int) / n.pot_int;
    let gn_equality = (q.p as usize * q.dim.as_usize() == 4).then(|| {
        let lhs = integral_of(&q.profile, |v| libm::pow(v.abs(), 2.0 * (d + 2.0) / d));
        (lhs - (d + 2.0) / d * n.grad_sq) / lhs
    });
    let j_minus_e = (q.j_q - q.e_q0) / q.e_q0;
    let half_mass = (q.dim == Dimension::Four && q.p == 1).then(|| (q.e_q0 - 0.5 * n.mass_sq) / n.mass_sq);
    IdentityReport { energy_identity, pohozaev, gn_equality, j_minus_e, half_mass }
}

/// Evaluate `∫|g|^{2(d+2)/d} ≤ ((d+2)/d)(‖g‖₂/‖Q‖₂)^{4/d}‖∇g‖₂²`.
pub fn verify_gn(g: &RadialField, q: &GroundState) -> Result<GnCheck> {
    let d = q.dim.as_usize();
    if q.p as usize * d != 4 {
        bail!(Parameter, "the sharp inequality needs the mass-critical power p = 4/d");
    }
    g.grid.check_same(&q.profile.grid)?;
    let df = d as f64;
    let lhs = integral_of(g, |v| libm::pow(v.abs(), 2.0 * (df + 2.0) / df));
    let ratio = libm::sqrt(mass_sq(g) / q.norms.mass_sq);
    let rhs = (df + 2.0) / df * libm::pow(ratio, 4.0 / df) * grad_sq(g);
    Ok(GnCheck { lhs, rhs, holds: lhs <= rhs * (1.0 + GN_TOL) })
}
