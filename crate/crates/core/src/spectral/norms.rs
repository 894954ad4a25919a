//! Besov-type norms `(Ḃ^{s0}_r | Ḃ^{s1}_r)` and their `L^q_t` space-time versions.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{inverse_transform, lebesgue_norm, lp_project_above, lp_project_below, transform};
use super::{DyadicWindow, RadialField};
use crate::cutoff::shell_symbol;
use crate::error::bail;
use crate::Result;

/// Spatial part of a space-time norm.
///
/// With `split = true` this is `(Σ_{k≤0} 2^{2s0 k}‖P_k f‖_r²)^{1/2} +
/// (Σ_{k≥0} 2^{2s1 k}‖P_k f‖_r²)^{1/2}`; otherwise the homogeneous
/// `Ḃ^{s0}_{r,2}` norm with a single sum over all `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovSpec {
    pub r_inv: f64,
    pub s0: f64,
    pub s1: f64,
    pub split: bool,
}

impl BesovSpec {
    pub fn split(r_inv: f64, s0: f64, s1: f64) -> Self {
        BesovSpec { r_inv, s0, s1, split: true }
    }

    pub fn single(r_inv: f64, s: f64) -> Self {
        BesovSpec { r_inv, s0: s, s1: s, split: false }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.r_inv) {
            bail!(Parameter, "1/r must lie in [0, 1], got {}", self.r_inv);
        }
        if !self.s0.is_finite() || !self.s1.is_finite() {
            bail!(Parameter, "regularity exponents must be finite");
        }
        Ok(())
    }
}

/// Exponents of `(1/q, 1/r, s0 | s1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeNormSpec {
    pub q_inv: f64,
    pub r_inv: f64,
    pub s0: f64,
    pub s1: f64,
    /// `false` for the single-exponent space `(1/q, 1/r, s)`.
    pub split: bool,
}

impl SpaceTimeNormSpec {
    pub fn split(q_inv: f64, r_inv: f64, s0: f64, s1: f64) -> Self {
        SpaceTimeNormSpec { q_inv, r_inv, s0, s1, split: true }
    }

    pub fn single(q_inv: f64, r_inv: f64, s: f64) -> Self {
        SpaceTimeNormSpec { q_inv, r_inv, s0: s, s1: s, split: false }
    }

    pub fn besov(&self) -> BesovSpec {
        BesovSpec { r_inv: self.r_inv, s0: self.s0, s1: self.s1, split: self.split }
    }

    /// `(0, 1/2, 0 | 1)`, i.e. `L^∞_t` of an `H¹`-like Besov norm.
    pub fn energy() -> Self {
        Self::split(0.0, 0.5, 0.0, 1.0)
    }
}

/// Besov norm of `f` over the grid's resolvable dyadic window.
pub fn besov_norm(f: &RadialField, spec: &BesovSpec) -> Result<f64> {
    besov_norm_windowed(f, spec).map(|(v, _)| v)
}

/// As [`besov_norm`], also returning the dyadic window the sum was truncated to.
pub fn besov_norm_windowed(f: &RadialField, spec: &BesovSpec) -> Result<(f64, DyadicWindow)> {
    spec.validate()?;
    let grid = &f.grid;
    let window = grid.dyadic_window();
    let fhat = transform(f);
    let mut low = 0.0;
    let mut high = 0.0;
    for k in window.iter() {
        let coeffs: Vec<_> = grid.freqs().iter().zip(&fhat.coeffs).map(|(&rho, c)| c * shell_symbol(k, rho)).collect();
        let piece = if spec.r_inv == 0.5 {
            let s: f64 = grid.freq_weights().iter().zip(&coeffs).map(|(w, c)| w * c.norm_sqr()).sum();
            libm::sqrt(s)
        } else {
            let pk = inverse_transform(&super::SpectralField { grid: grid.clone(), coeffs });
            lebesgue_norm(grid, &pk.values, spec.r_inv)
        };
        let kf = k as f64;
        if !spec.split {
            low += libm::exp2(2.0 * spec.s0 * kf) * piece * piece;
            continue;
        }
        if k <= 0 {
            low += libm::exp2(2.0 * spec.s0 * kf) * piece * piece;
        }
        if k >= 0 {
            high += libm::exp2(2.0 * spec.s1 * kf) * piece * piece;
        }
    }
    Ok((libm::sqrt(low) + libm::sqrt(high), window))
}

/// `L^q_t` over a uniformly sampled trajectory (trapezoidal rule in `t`) of
/// the spatial Besov norm. `q_inv = 0` is the supremum over samples.
pub fn spacetime_norm(traj: &[RadialField], dt: f64, spec: &SpaceTimeNormSpec) -> Result<f64> {
    let values = traj.iter().map(|f| besov_norm(f, &spec.besov())).collect::<Result<Vec<_>>>()?;
    time_norm(&values, dt, spec.q_inv)
}

pub(crate) fn time_norm(values: &[f64], dt: f64, q_inv: f64) -> Result<f64> {
    if values.is_empty() {
        bail!(Parameter, "empty trajectory");
    }
    if !(0.0..=1.0).contains(&q_inv) {
        bail!(Parameter, "1/q must lie in [0, 1], got {q_inv}");
    }
    if q_inv == 0.0 {
        return Ok(values.iter().cloned().fold(0.0, f64::max));
    }
    if values.len() == 1 {
        return Ok(0.0);
    }
    if !(dt > 0.0) {
        bail!(Parameter, "time step must be positive, got {dt}");
    }
    let q = 1.0 / q_inv;
    let p: Vec<f64> = values.iter().map(|v| libm::pow(*v, q)).collect();
    let n = p.len();
    let s = dt * (0.5 * (p[0] + p[n - 1]) + p[1..n - 1].iter().sum::<f64>());
    Ok(libm::pow(s, q_inv))
}

/// Frequency restriction applied before a norm term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    All,
    /// `P_{≥0}`
    High,
    /// `P_{≤0}`
    Low,
}

impl Band {
    fn apply(self, f: &RadialField) -> RadialField {
        match self {
            Band::All => f.clone(),
            Band::High => lp_project_above(f, 0),
            Band::Low => lp_project_below(f, 0),
        }
    }
}

/// One summand of a composite norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormTerm {
    Besov(Band, SpaceTimeNormSpec),
    /// Plain `L^q_t L^r_x`.
    Lebesgue {
        band: Band,
        q_inv: f64,
        r_inv: f64,
    },
}

/// A sum of space-time norms. Intersections `X ∩ Y` are normed by `‖·‖_X + ‖·‖_Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeNorm {
    pub name: String,
    pub terms: Vec<NormTerm>,
}

impl CompositeNorm {
    /// Value on a uniformly sampled trajectory, plus the value of each term.
    pub fn evaluate(&self, traj: &[RadialField], dt: f64) -> Result<(f64, Vec<f64>)> {
        let mut parts = vec![];
        for term in &self.terms {
            let v = match *term {
                NormTerm::Besov(band, spec) => {
                    let vals =
                        traj.iter().map(|f| besov_norm(&band.apply(f), &spec.besov())).collect::<Result<Vec<_>>>()?;
                    time_norm(&vals, dt, spec.q_inv)?
                }
                NormTerm::Lebesgue { band, q_inv, r_inv } => {
                    if !(0.0..=1.0).contains(&r_inv) {
                        bail!(Parameter, "1/r must lie in [0, 1], got {r_inv}");
                    }
                    let vals: Vec<f64> = traj.iter().map(|f| band.apply(f).lebesgue_norm(r_inv)).collect();
                    time_norm(&vals, dt, q_inv)?
                }
            };
            parts.push(v);
        }
        Ok((parts.iter().sum(), parts))
    }

    /// Strong Strichartz norm `S(I)` for `d = 3` or `4`.
    pub fn strong_strichartz(d: usize, kappa: f64) -> Result<Self> {
        use NormTerm::Besov;
        let second = match d {
            3 => SpaceTimeNormSpec::split(0.5, 0.3 - kappa, 0.4 - 3.0 * kappa, 0.7 + kappa),
            4 => SpaceTimeNormSpec::split(0.5, 5.0 / 14.0 - kappa, 3.0 / 7.0 - 4.0 * kappa, 11.0 / 14.0 + kappa),
            _ => bail!(Parameter, "S(I) is defined for d = 3, 4 only"),
        };
        Ok(CompositeNorm {
            name: "S".into(),
            terms: vec![Besov(Band::All, SpaceTimeNormSpec::energy()), Besov(Band::All, second)],
        })
    }

    /// Interpolation norm `Z(I)` between `L^∞_t L³_x` and `L^∞_t H¹_x`.
    pub fn z_norm(d: usize, delta: f64) -> Result<Self> {
        let spec = match d {
            3 => SpaceTimeNormSpec::split(0.0, 0.0, -1.25, -0.75),
            4 => SpaceTimeNormSpec::split(0.0, 0.0, -0.5, -4.0 / 3.0 + delta),
            _ => bail!(Parameter, "Z(I) is defined for d = 3, 4 only"),
        };
        Ok(CompositeNorm { name: "Z".into(), terms: vec![NormTerm::Besov(Band::All, spec)] })
    }

    /// Weak Strichartz norm `S̃(I)`.
    pub fn weak_strichartz(d: usize, epsilon: f64, kappa: f64) -> Result<Self> {
        use NormTerm::{Besov, Lebesgue};
        let e = epsilon;
        let terms = match d {
            3 => vec![
                Besov(Band::High, SpaceTimeNormSpec::single(0.5 - e, 0.25 + e, 0.25 + 2.0 * e)),
                Besov(Band::Low, SpaceTimeNormSpec::single(e, 0.5 - 2.0 * e, -e)),
                Besov(Band::All, SpaceTimeNormSpec::split(1.0 / 3.0, 1.0 / 6.0, -e, e)),
            ],
            4 => vec![
                Besov(Band::High, SpaceTimeNormSpec::single(0.5 - e, 0.25 + e, 7.0 * e)),
                Besov(Band::High, SpaceTimeNormSpec::single(0.5 - e, 0.25 + 3.0 * e, 2.0 / 7.0)),
                Besov(Band::Low, SpaceTimeNormSpec::single(0.5 - e, 0.25 - e, e)),
                Lebesgue { band: Band::Low, q_inv: 1.0 / 3.0, r_inv: 1.0 / 6.0 },
                Besov(
                    Band::Low,
                    SpaceTimeNormSpec::single(e, 2.0 * e * (5.0 / 14.0 - kappa) + (1.0 - 4.0 * e) * 0.5, 1.0),
                ),
            ],
            _ => bail!(Parameter, "S̃(I) is defined for d = 3, 4 only"),
        };
        Ok(CompositeNorm { name: "S~".into(), terms })
    }
}
