//! Radial grids, the discrete Hankel transform, Fourier multipliers,
//! Littlewood–Paley projections and Besov / space-time norms.
//!
//! Radial functions on `R^d` are sampled at collocation nodes `r_i`; their
//! Fourier transforms at frequency nodes `ρ_j`. The transform is the unitary
//! one, `f̂(ξ) = (2π)^{-d/2} ∫ f(x) e^{-ix·ξ} dx`, so the Gaussian
//! `e^{-|x|²/2}` is its own transform.

mod grid;
mod norms;

use alloc::vec;
use alloc::vec::Vec;

use crate::cutoff::{low_symbol, shell_symbol};
use crate::error::bail;
use crate::{Complex64, Result};

pub use grid::{make_grid, Dimension, DyadicWindow, RadialGrid};
pub use norms::{
    besov_norm, besov_norm_windowed, spacetime_norm, Band, BesovSpec, CompositeNorm, NormTerm, SpaceTimeNormSpec,
};

/// `⟨ρ⟩ = (1 + ρ²)^{1/2}`.
#[inline]
pub fn japanese(rho: f64) -> f64 {
    libm::sqrt(1.0 + rho * rho)
}

/// Samples of a radial function at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    pub grid: RadialGrid,
    pub values: Vec<Complex64>,
}

/// Hankel coefficients of a radial function at the frequency nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: RadialGrid,
    pub coeffs: Vec<Complex64>,
}

impl RadialField {
    pub fn new(grid: &RadialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            bail!(Shape, "expected {} samples, got {}", grid.len(), values.len());
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            bail!(Numeric, "non-finite sample in radial field");
        }
        Ok(RadialField { grid: grid.clone(), values })
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        RadialField { grid: grid.clone(), values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_real(grid: &RadialGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Sample `f(r)` at the grid nodes.
    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let v: Vec<f64> = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::from_real(grid, &v)
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.im).collect()
    }

    pub fn scale(&self, a: f64) -> Self {
        RadialField { grid: self.grid.clone(), values: self.values.iter().map(|v| v * a).collect() }
    }

    pub fn conj(&self) -> Self {
        RadialField { grid: self.grid.clone(), values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn add(&self, other: &RadialField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(RadialField { grid: self.grid.clone(), values })
    }

    pub fn sub(&self, other: &RadialField) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// `‖f‖_{L^r(R^d)}` with `r_inv = 1/r`; `r_inv = 0` is the sup norm.
    pub fn lebesgue_norm(&self, r_inv: f64) -> f64 {
        lebesgue_norm(&self.grid, &self.values, r_inv)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lebesgue_norm(0.5)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `‖f‖_{H^s}` evaluated spectrally.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        transform(self).sobolev_norm(s)
    }
}

pub(crate) fn lebesgue_norm(grid: &RadialGrid, values: &[Complex64], r_inv: f64) -> f64 {
    if r_inv == 0.0 {
        return values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    let r = 1.0 / r_inv;
    let s: f64 = grid.weights().iter().zip(values).map(|(w, v)| w * libm::pow(v.norm(), r)).sum();
    libm::pow(s, r_inv)
}

impl SpectralField {
    pub fn new(grid: &RadialGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            bail!(Shape, "expected {} coefficients, got {}", grid.len(), coeffs.len());
        }
        Ok(SpectralField { grid: grid.clone(), coeffs })
    }

    /// Sample `f̂(ρ)` at the frequency nodes.
    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        let coeffs = grid.freqs().iter().map(|&k| Complex64::new(f(k), 0.0)).collect();
        SpectralField { grid: grid.clone(), coeffs }
    }

    /// `‖f̂‖_{L²}` via the frequency quadrature.
    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// `(Σ w'_j ⟨ρ_j⟩^{2s} |f̂_j|²)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let g = &self.grid;
        let sum: f64 = g
            .freq_weights()
            .iter()
            .zip(g.freqs())
            .zip(&self.coeffs)
            .map(|((w, &k), c)| w * libm::pow(japanese(k), 2.0 * s) * c.norm_sqr())
            .sum();
        libm::sqrt(sum)
    }
}

fn split(values: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (values.iter().map(|v| v.re).collect(), values.iter().map(|v| v.im).collect())
}

fn join(re: &[f64], im: &[f64]) -> Vec<Complex64> {
    re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
}

/// Forward radial Fourier transform.
pub fn transform(f: &RadialField) -> SpectralField {
    let g = &f.grid;
    let (re, im) = split(&f.values);
    let mut ore = vec![0.0; g.len()];
    let mut oim = vec![0.0; g.len()];
    g.forward_real(&re, &mut ore);
    if im.iter().any(|&v| v != 0.0) {
        g.forward_real(&im, &mut oim);
    }
    SpectralField { grid: g.clone(), coeffs: join(&ore, &oim) }
}

/// Inverse radial Fourier transform.
pub fn inverse_transform(f: &SpectralField) -> RadialField {
    let g = &f.grid;
    let (re, im) = split(&f.coeffs);
    let mut ore = vec![0.0; g.len()];
    let mut oim = vec![0.0; g.len()];
    g.inverse_real(&re, &mut ore);
    if im.iter().any(|&v| v != 0.0) {
        g.inverse_real(&im, &mut oim);
    }
    RadialField { grid: g.clone(), values: join(&ore, &oim) }
}

/// `∂_r` of the function with the given coefficients, at the spatial nodes.
pub fn radial_derivative(f: &SpectralField) -> RadialField {
    let g = &f.grid;
    let (re, im) = split(&f.coeffs);
    let mut ore = vec![0.0; g.len()];
    let mut oim = vec![0.0; g.len()];
    g.derivative_real(&re, &mut ore);
    g.derivative_real(&im, &mut oim);
    RadialField { grid: g.clone(), values: join(&ore, &oim) }
}

/// Multiply coefficients pointwise by a real radial symbol `m(ρ)`.
pub fn apply_multiplier(f: &SpectralField, m: impl Fn(f64) -> f64) -> Result<SpectralField> {
    apply_complex_multiplier(f, |k| Complex64::new(m(k), 0.0))
}

/// Multiply coefficients pointwise by a complex radial symbol `m(ρ)`.
pub fn apply_complex_multiplier(f: &SpectralField, m: impl Fn(f64) -> Complex64) -> Result<SpectralField> {
    let mut coeffs = Vec::with_capacity(f.coeffs.len());
    for (&k, c) in f.grid.freqs().iter().zip(&f.coeffs) {
        let s = m(k);
        if !s.re.is_finite() || !s.im.is_finite() {
            bail!(Numeric, "multiplier is not finite at ρ = {k}");
        }
        coeffs.push(c * s);
    }
    Ok(SpectralField { grid: f.grid.clone(), coeffs })
}

/// `⟨D⟩^s f`.
pub fn bessel_potential(f: &RadialField, s: f64) -> RadialField {
    let m = apply_multiplier(&transform(f), |k| libm::pow(japanese(k), s)).expect("finite symbol");
    inverse_transform(&m)
}

/// Littlewood–Paley block `P_k f`.
pub fn lp_project(f: &RadialField, k: i32) -> RadialField {
    let m = apply_multiplier(&transform(f), |rho| shell_symbol(k, rho)).expect("finite symbol");
    inverse_transform(&m)
}

/// Low-frequency projection `P_{≤k} f`.
pub fn lp_project_below(f: &RadialField, k: i32) -> RadialField {
    let m = apply_multiplier(&transform(f), |rho| low_symbol(k, rho)).expect("finite symbol");
    inverse_transform(&m)
}

/// High-frequency projection `P_{≥k} f = f - P_{≤k-1} f`.
pub fn lp_project_above(f: &RadialField, k: i32) -> RadialField {
    let m = apply_multiplier(&transform(f), |rho| 1.0 - low_symbol(k - 1, rho)).expect("finite symbol");
    inverse_transform(&m)
}

/// Klein–Gordon half-wave propagator `K(t) = e^{it⟨D⟩}`.
pub fn half_wave(f: &RadialField, t: f64) -> RadialField {
    inverse_transform(&half_wave_spectral(&transform(f), t))
}

/// `K(t)` acting on coefficients.
pub fn half_wave_spectral(f: &SpectralField, t: f64) -> SpectralField {
    let coeffs =
        f.grid.freqs().iter().zip(&f.coeffs).map(|(&k, c)| c * Complex64::from_polar(1.0, t * japanese(k))).collect();
    SpectralField { grid: f.grid.clone(), coeffs }
}

#[cfg(test)]
mod tests;
