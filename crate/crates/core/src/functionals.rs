//! Energy, stationary energy, the sign functionals `K_{α,β}`, the virial
//! functional and the below-threshold classifier.

use alloc::vec::Vec;

use crate::error::bail;
use crate::groundstate::GroundState;
use crate::spectral::{transform, Dimension, RadialField};
use crate::Result;

/// Nonlinear term of `u_tt - Δu + m²u = f(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nonlinearity {
    /// Linear Klein–Gordon, `f = 0`.
    Free,
    /// `f(u) = u²`.
    Quadratic,
    /// `f(u) = u^{p+1}`.
    Power { p: u32 },
    /// `f(w) = -3w² - w³` with mass `m² = 2` (the φ⁴ model about its vacuum).
    Phi4,
}

impl Nonlinearity {
    /// Power-type nonlinearity `u^{p+1}`; `p = 1` is the quadratic case.
    pub fn power(p: u32) -> Self {
        if p == 1 {
            Nonlinearity::Quadratic
        } else {
            Nonlinearity::Power { p }
        }
    }

    /// The exponent `p` for power-type nonlinearities.
    pub fn exponent(self) -> Option<u32> {
        match self {
            Nonlinearity::Quadratic => Some(1),
            Nonlinearity::Power { p } => Some(p),
            _ => None,
        }
    }

    /// `m²` in the linear part.
    pub fn mass_sq(self) -> f64 {
        match self {
            Nonlinearity::Phi4 => 2.0,
            _ => 1.0,
        }
    }

    pub fn f(self, u: f64) -> f64 {
        match self {
            Nonlinearity::Free => 0.0,
            Nonlinearity::Quadratic => u * u,
            Nonlinearity::Power { p } => libm::pow(u, (p + 1) as f64),
            Nonlinearity::Phi4 => -3.0 * u * u - u * u * u,
        }
    }

    /// `F(u) = ∫₀^u f`.
    pub fn antiderivative(self, u: f64) -> f64 {
        match self {
            Nonlinearity::Free => 0.0,
            Nonlinearity::Quadratic => u * u * u / 3.0,
            Nonlinearity::Power { p } => libm::pow(u, (p + 2) as f64) / (p + 2) as f64,
            Nonlinearity::Phi4 => -u * u * u - 0.25 * u * u * u * u,
        }
    }

    /// `G(u) = u f(u) - 2F(u)`.
    pub fn g(self, u: f64) -> f64 {
        u * self.f(u) - 2.0 * self.antiderivative(u)
    }

    /// Forcing seen by the unit-mass first-order system:
    /// `u_tt - Δu + u = f(u) - (m² - 1)u`.
    pub fn effective(self, u: f64) -> f64 {
        self.f(u) - (self.mass_sq() - 1.0) * u
    }
}

/// Exponents `(α, β)` of the scaling family `e^{αλ}φ(e^{-βλ}x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for VariationalParams {
    fn default() -> Self {
        VariationalParams { alpha: 1.0, beta: 0.0 }
    }
}

/// Below-threshold region of the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    KPlus,
    KMinus,
    Indeterminate,
}

/// Classification of initial data together with the quantities it was based on.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub region: Region,
    /// Mass equals `‖Q‖₂` within the classifier's tolerance band.
    pub boundary: bool,
    pub energy: f64,
    pub energy_threshold: f64,
    pub mass_ratio: f64,
    pub k10: f64,
    pub k_virial: f64,
}

/// Relative tolerance of the mass comparison in [`classify`].
pub const MASS_TIE_TOL: f64 = 1e-6;

fn real(f: &RadialField) -> Vec<f64> {
    f.re()
}

/// `‖∇f‖₂²`, evaluated spectrally as `∫|ξ|²|f̂|² dξ`.
pub fn grad_sq(f: &RadialField) -> f64 {
    let fh = transform(f);
    let g = &f.grid;
    g.freq_weights().iter().zip(g.freqs()).zip(&fh.coeffs).map(|((w, k), c)| w * k * k * c.norm_sqr()).sum()
}

/// `‖f‖₂²`.
pub fn mass_sq(f: &RadialField) -> f64 {
    f.grid.weights().iter().zip(&f.values).map(|(w, v)| w * v.norm_sqr()).sum()
}

/// `∫ h(Re f) dx`.
pub fn integral_of(f: &RadialField, h: impl Fn(f64) -> f64) -> f64 {
    f.grid.weights().iter().zip(&f.values).map(|(w, v)| w * h(v.re)).sum()
}

/// `‖f‖_{H¹}² = ‖∇f‖₂² + ‖f‖₂²`.
pub fn h1_sq(f: &RadialField) -> f64 {
    grad_sq(f) + mass_sq(f)
}

/// `E(u, u_t) = ∫ ½u_t² + ½|∇u|² + ½m²u² - F(u)`.
pub fn energy(u: &RadialField, ut: &RadialField, nl: Nonlinearity) -> Result<f64> {
    u.grid.check_same(&ut.grid)?;
    let kinetic: f64 = u.grid.integrate(&real(ut).iter().map(|v| v * v).collect::<Vec<_>>());
    Ok(0.5 * kinetic + stationary_energy_j(u, nl))
}

/// `J(φ) = ½‖∇φ‖² + ½m²‖φ‖² - ∫F(φ)`.
pub fn stationary_energy_j(phi: &RadialField, nl: Nonlinearity) -> f64 {
    0.5 * grad_sq(phi) + 0.5 * nl.mass_sq() * mass_sq(phi) - integral_of(phi, |v| nl.antiderivative(v))
}

/// `K_{α,β}(φ) = ∂_λ J(e^{αλ}φ(e^{-βλ}·))|_{λ=0}`.
pub fn sign_functional_k(phi: &RadialField, params: VariationalParams, nl: Nonlinearity) -> f64 {
    let d = phi.grid.dim().as_f64();
    let (a, b) = (params.alpha, params.beta);
    0.5 * (2.0 * a + (d - 2.0) * b) * grad_sq(phi) + 0.5 * (2.0 * a + d * b) * nl.mass_sq() * mass_sq(phi)
        - a * integral_of(phi, |v| v * nl.f(v))
        - d * b * integral_of(phi, |v| nl.antiderivative(v))
}

/// Virial functional `‖∇g‖₂² - (d/(d+2))∫|g|^{2(d+2)/d}`, mass-critical case `d = 4`.
pub fn virial_k(g: &RadialField) -> Result<f64> {
    if g.grid.dim() != Dimension::Four {
        bail!(Parameter, "the virial functional is implemented for d = 4");
    }
    let cube: f64 = g
        .grid
        .weights()
        .iter()
        .zip(&g.values)
        .map(|(w, v)| {
            let a = v.norm();
            w * a * a * a
        })
        .sum();
    Ok(grad_sq(g) - 2.0 / 3.0 * cube)
}

/// Place quadratic-equation initial data `(u0, u1)` relative to the ground state.
pub fn classify(u0: &RadialField, u1: &RadialField, q: &GroundState) -> Result<Verdict> {
    if u0.grid.dim() != Dimension::Four || q.dim != Dimension::Four {
        bail!(Parameter, "the dichotomy classifier applies to d = 4");
    }
    if q.p != 1 {
        bail!(Parameter, "the classifier needs the quadratic ground state (p = 1)");
    }
    u0.grid.check_same(&q.profile.grid)?;
    let nl = Nonlinearity::Quadratic;
    let e = energy(u0, u1, nl)?;
    let mass_ratio = libm::sqrt(mass_sq(u0) / q.norms.mass_sq);
    let k10 = sign_functional_k(u0, VariationalParams::default(), nl);
    let k_virial = virial_k(u0)?;
    let below = e < q.e_q0;
    let boundary = below && (mass_ratio - 1.0).abs() <= MASS_TIE_TOL;
    let region = if !below || boundary {
        Region::Indeterminate
    } else if mass_ratio < 1.0 {
        Region::KPlus
    } else {
        Region::KMinus
    };
    Ok(Verdict { region, boundary, energy: e, energy_threshold: q.e_q0, mass_ratio, k10, k_virial })
}
