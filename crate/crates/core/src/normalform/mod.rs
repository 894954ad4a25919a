//! Frequency regions, modulation symbols, radial bilinear multipliers and the
//! normal form transform of the first-order equation
//! `i∂_t U + ⟨D⟩U = ⟨D⟩⁻¹ f(u)`, `u = Re U`.
//!
//! With `U^+ = U`, `U^- = Ū` and `Φ_ι(ξ,η) = -⟨ξ⟩ + ι₁⟨ξ-η⟩ + ι₂⟨η⟩`, the
//! normal form is
//!
//! ```text
//! Ω_ι(f, g)^(ξ) = ∫ m_LL(ξ-η, η) / (iΦ_ι(ξ,η)) f̂(ξ-η) ĝ(η) dη
//! ```
//!
//! with `m_LL(a, b) = χ(a/2^K) χ(b/2^K)`, `K = 10 - β`.

mod bilinear;
mod residual;

use alloc::vec::Vec;

use crate::error::bail;
use crate::quadrature::halton;
use crate::spectral::{japanese, lp_project_below, CompositeNorm, RadialField};
use crate::{Complex64, Result};

pub use bilinear::{bilinear_apply, BilinearEngine, DEFAULT_ANGLES};
pub use residual::{boundary_term, normal_form_residual, normal_form_residual_with, ReducedEquationTerms};

/// Frequency-separation parameter and the small exponents of the S/Z/S̃ norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisParams {
    pub beta: i32,
    pub kappa: f64,
    pub epsilon: f64,
    pub delta: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams { beta: 6, kappa: 0.001, epsilon: 0.01, delta: 0.01 }
    }
}

impl AnalysisParams {
    pub fn with_beta(beta: i32) -> Result<Self> {
        let p = AnalysisParams { beta, ..Default::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta < 3 {
            bail!(Parameter, "beta must be at least 3, got {}", self.beta);
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.05) {
            bail!(Parameter, "epsilon must lie in (0, 0.05], got {}", self.epsilon);
        }
        if !(self.kappa > 0.0 && self.kappa <= self.epsilon / 10.0) {
            bail!(Parameter, "kappa must lie in (0, epsilon/10], got {}", self.kappa);
        }
        if !(self.delta > 0.0) {
            bail!(Parameter, "delta must be positive, got {}", self.delta);
        }
        Ok(())
    }

    /// `K = 10 - β`: the low-low symbol is `χ_K(|ξ-η|) χ_K(|η|)`.
    pub fn ll_index(&self) -> i32 {
        10 - self.beta
    }

    pub fn strong_norm(&self, d: usize) -> Result<CompositeNorm> {
        CompositeNorm::strong_strichartz(d, self.kappa)
    }

    pub fn weak_norm(&self, d: usize) -> Result<CompositeNorm> {
        CompositeNorm::weak_strichartz(d, self.epsilon, self.kappa)
    }

    pub fn z_norm(&self, d: usize) -> Result<CompositeNorm> {
        CompositeNorm::z_norm(d, self.delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Sign pair `(ι₁, ι₂)` of a quadratic interaction `U^{ι₁} U^{ι₂}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModulationSpec {
    pub iota1: Sign,
    pub iota2: Sign,
}

impl ModulationSpec {
    pub const ALL: [ModulationSpec; 4] = [
        ModulationSpec { iota1: Sign::Plus, iota2: Sign::Plus },
        ModulationSpec { iota1: Sign::Plus, iota2: Sign::Minus },
        ModulationSpec { iota1: Sign::Minus, iota2: Sign::Plus },
        ModulationSpec { iota1: Sign::Minus, iota2: Sign::Minus },
    ];

    pub fn new(iota1: Sign, iota2: Sign) -> Self {
        ModulationSpec { iota1, iota2 }
    }

    /// `Φ` in terms of `|ξ|`, `|ξ-η|` and `|η|`.
    #[inline]
    pub fn phi(self, xi: f64, a: f64, b: f64) -> f64 {
        -japanese(xi) + self.iota1.value() * japanese(a) + self.iota2.value() * japanese(b)
    }
}

/// `Φ_ι(ξ, η)` for `|ξ|`, `|η|` and the cosine of the angle between them.
pub fn modulation_phi(xi_abs: f64, eta_abs: f64, cosang: f64, spec: ModulationSpec) -> f64 {
    let c = cosang.clamp(-1.0, 1.0);
    let a = libm::sqrt((xi_abs * xi_abs + eta_abs * eta_abs - 2.0 * xi_abs * eta_abs * c).max(0.0));
    spec.phi(xi_abs, a, eta_abs)
}

/// Dyadic frequency-pair regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrequencyRegion {
    HH,
    HL,
    LH,
    LL,
}

/// Every region containing the dyadic pair `(j, k)`. The regions overlap; their
/// union is all of `Z²`.
pub fn region_of(j: i32, k: i32, params: &AnalysisParams) -> Vec<FrequencyRegion> {
    let b = params.beta;
    let mut out = Vec::new();
    if j >= -b - 10 && k >= -b - 10 {
        out.push(FrequencyRegion::HH);
    }
    if j >= k + 5 && j >= -b - 10 && k <= -b + 10 {
        out.push(FrequencyRegion::HL);
    }
    if k >= j + 5 && k >= -b - 10 && j <= -b + 10 {
        out.push(FrequencyRegion::LH);
    }
    if j <= -b + 10 && k <= -b + 10 {
        out.push(FrequencyRegion::LL);
    }
    out
}

/// Smallest sampled value of `|Φ_ι| ⟨min(|ξ-η|, |η|)⟩` over the low-low support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationBound {
    pub c: f64,
    pub samples: usize,
    /// `(|ξ-η|, |η|, cos∠(ξ-η, η))` of the minimiser.
    pub at: (f64, f64, f64),
    pub spec: ModulationSpec,
}

/// Sample `|ξ-η|, |η| ∈ [0, 2^{11-β})` and the angle between `ξ-η` and `η`
/// with a Halton sequence and record the smallest normalised modulation.
/// Deterministic; `beta` is not range-checked so degraded values can be measured.
pub fn measure_modulation_bound(beta: i32, samples: usize) -> ModulationBound {
    let top = libm::exp2((11 - beta) as f64);
    let mut best = ModulationBound { c: f64::INFINITY, samples, at: (0.0, 0.0, 0.0), spec: ModulationSpec::ALL[0] };
    for i in 1..=samples as u64 {
        let a = top * halton(i, 2);
        let b = top * halton(i, 3);
        let cos = 2.0 * halton(i, 5) - 1.0;
        let xi = libm::sqrt((a * a + b * b + 2.0 * a * b * cos).max(0.0));
        let weight = japanese(a.min(b));
        for spec in ModulationSpec::ALL {
            let v = spec.phi(xi, a, b).abs() * weight;
            if v < best.c {
                best = ModulationBound { c: v, samples, at: (a, b, cos), spec };
            }
        }
    }
    best
}

/// Low-low and resonant parts of a pointwise product.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSplit {
    /// `(fg)_LL = P_{≤K} f · P_{≤K} g`
    pub ll: RadialField,
    /// `T_Res(f, g) = fg - (fg)_LL`
    pub rest: RadialField,
}

/// Split `f g` into the part removed by the normal form and the resonance term.
pub fn resonance_split(f: &RadialField, g: &RadialField, params: &AnalysisParams) -> Result<ResonanceSplit> {
    f.grid.check_same(&g.grid)?;
    let k = params.ll_index();
    let fl = lp_project_below(f, k);
    let gl = lp_project_below(g, k);
    let ll: Vec<Complex64> = fl.values.iter().zip(&gl.values).map(|(a, b)| a * b).collect();
    let rest = f.values.iter().zip(&g.values).zip(&ll).map(|((a, b), l)| a * b - l).collect();
    Ok(ResonanceSplit {
        ll: RadialField { grid: f.grid.clone(), values: ll },
        rest: RadialField { grid: f.grid.clone(), values: rest },
    })
}

/// `Ω_ι(f, g)` with the low-low cutoff `m_LL`.
pub fn omega(f: &RadialField, g: &RadialField, spec: ModulationSpec, params: &AnalysisParams) -> Result<RadialField> {
    let engine = BilinearEngine::new(&f.grid, DEFAULT_ANGLES)?;
    engine.omega(f, g, spec, params)
}
