//! Discrete check of the normal-form reduced equation
//!
//! ```text
//! U(t) = K(t)(U₀ + iB(0)) - iB(t) - i∫₀ᵗ K(t-s)⟨D⟩⁻¹T_Res(u,u) ds + ∫₀ᵗ K(t-s)⟨D⟩⁻¹C ds
//! ```
//!
//! where `B = ¼⟨D⟩⁻¹ Σ_ι Ω_ι(U^{ι₁}, U^{ι₂})`, `V = ⟨D⟩⁻¹(u²)` and
//! `C = ¼ Σ_ι [ι₁ Ω_ι(V, U^{ι₂}) + ι₂ Ω_ι(U^{ι₁}, V)]`, for `f(u) = u²`.

use alloc::vec;
use alloc::vec::Vec;

use super::{AnalysisParams, BilinearEngine, DEFAULT_ANGLES};
use crate::error::bail;
use crate::evolution::Trajectory;
use crate::functionals::Nonlinearity;
use crate::quadrature::cumulative_integral;
use crate::spectral::{japanese, transform, RadialField, SpectralField};
use crate::{Complex64, Result};

/// Norms of the pieces of the reduced equation at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedEquationTerms {
    pub t: f64,
    /// `‖U - RHS‖_{H¹}`
    pub residual: f64,
    /// `‖B‖_{H¹}`
    pub boundary: f64,
    /// `‖⟨D⟩⁻¹T_Res(u,u)‖_{H¹}`
    pub resonant: f64,
    /// `‖⟨D⟩⁻¹C‖_{H¹}`
    pub cubic: f64,
}

fn scale_by(f: &SpectralField, m: impl Fn(f64) -> Complex64) -> SpectralField {
    let coeffs = f.grid.freqs().iter().zip(&f.coeffs).map(|(&k, c)| c * m(k)).collect();
    SpectralField { grid: f.grid.clone(), coeffs }
}

fn inv_japanese(f: &SpectralField) -> SpectralField {
    scale_by(f, |k| Complex64::new(1.0 / japanese(k), 0.0))
}

/// Real part of `U` in space, from its coefficients.
fn real_part(u_hat: &SpectralField) -> Vec<f64> {
    let g = &u_hat.grid;
    let re: Vec<f64> = u_hat.coeffs.iter().map(|c| c.re).collect();
    let mut out = vec![0.0; g.len()];
    g.inverse_real(&re, &mut out);
    out
}

/// Normal-form boundary term `B = ¼⟨D⟩⁻¹ Σ_ι Ω_ι(U^{ι₁}, U^{ι₂})` on coefficients.
pub fn boundary_term(engine: &BilinearEngine, u_hat: &SpectralField, params: &AnalysisParams) -> Result<SpectralField> {
    let s = engine.omega_sum(u_hat, u_hat, [0.25; 4], params)?;
    Ok(inv_japanese(&s))
}

fn supported(nl: Nonlinearity) -> Result<bool> {
    match nl {
        Nonlinearity::Free => Ok(false),
        Nonlinearity::Quadratic => Ok(true),
        _ => bail!(Parameter, "the reduced equation is implemented for f(u) = u² and the free equation"),
    }
}

/// `H¹` residual of the reduced equation at every sample of `traj`.
pub fn normal_form_residual(traj: &Trajectory, params: &AnalysisParams) -> Result<Vec<f64>> {
    let Some(first) = traj.states.first() else {
        bail!(Parameter, "empty trajectory");
    };
    let engine = BilinearEngine::new(&first.u_hat.grid, DEFAULT_ANGLES)?;
    Ok(normal_form_residual_with(traj, params, &engine)?.iter().map(|t| t.residual).collect())
}

/// As [`normal_form_residual`], with a caller-provided engine and the norms of
/// every term.
pub fn normal_form_residual_with(
    traj: &Trajectory,
    params: &AnalysisParams,
    engine: &BilinearEngine,
) -> Result<Vec<ReducedEquationTerms>> {
    params.validate()?;
    let n_s = traj.states.len();
    if n_s < 3 {
        bail!(Parameter, "need at least 3 samples, got {n_s}");
    }
    if !(traj.dt > 0.0) {
        bail!(Parameter, "sample spacing must be positive");
    }
    let nonlinear = supported(traj.nl)?;
    let grid = traj.states[0].u_hat.grid.clone();
    let n = grid.len();
    let t0 = traj.states[0].t;
    let k_ll = params.ll_index();
    let zero = SpectralField { grid: grid.clone(), coeffs: vec![Complex64::new(0.0, 0.0); n] };

    let mut boundary = Vec::with_capacity(n_s);
    // integrands K(-s)R(s), stored frequency-major for the time quadrature
    let mut integrand = vec![vec![Complex64::new(0.0, 0.0); n_s]; n];
    let mut resonant_norm = Vec::with_capacity(n_s);
    let mut cubic_norm = Vec::with_capacity(n_s);
    for (i, st) in traj.states.iter().enumerate() {
        if st.u_hat.grid != grid {
            bail!(Shape, "trajectory samples live on different grids");
        }
        let expected = t0 + i as f64 * traj.dt;
        if (st.t - expected).abs() > 1e-9 * traj.dt.max(expected.abs()) {
            bail!(Parameter, "samples are not uniformly spaced at t = {}", st.t);
        }
        if !nonlinear {
            boundary.push(zero.clone());
            resonant_norm.push(0.0);
            cubic_norm.push(0.0);
            continue;
        }
        let u = real_part(&st.u_hat);
        let u_field = RadialField::from_real(&grid, &u)?;
        let u_low = crate::spectral::lp_project_below(&u_field, k_ll).re();
        let sq: Vec<f64> = u.iter().map(|v| v * v).collect();
        let res: Vec<f64> = u.iter().zip(&u_low).map(|(v, l)| v * v - l * l).collect();
        let v_hat = inv_japanese(&transform(&RadialField::from_real(&grid, &sq)?));
        let t_hat = inv_japanese(&transform(&RadialField::from_real(&grid, &res)?));
        let c1 = engine.omega_sum(&v_hat, &st.u_hat, [0.25, 0.25, -0.25, -0.25], params)?;
        let c2 = engine.omega_sum(&st.u_hat, &v_hat, [0.25, -0.25, 0.25, -0.25], params)?;
        let c_hat = inv_japanese(&SpectralField {
            grid: grid.clone(),
            coeffs: c1.coeffs.iter().zip(&c2.coeffs).map(|(a, b)| a + b).collect(),
        });
        resonant_norm.push(t_hat.sobolev_norm(1.0));
        cubic_norm.push(c_hat.sobolev_norm(1.0));
        let s = st.t - t0;
        for (m, &k) in grid.freqs().iter().enumerate() {
            let r = Complex64::new(0.0, -1.0) * t_hat.coeffs[m] + c_hat.coeffs[m];
            integrand[m][i] = r * Complex64::from_polar(1.0, -s * japanese(k));
        }
        boundary.push(boundary_term(engine, &st.u_hat, params)?);
    }
    let cumulative: Vec<Vec<Complex64>> = integrand.iter().map(|series| cumulative_integral(series, traj.dt)).collect();

    let iu = Complex64::new(0.0, 1.0);
    let u0 = &traj.states[0].u_hat;
    let mut out = Vec::with_capacity(n_s);
    for (i, st) in traj.states.iter().enumerate() {
        let s = st.t - t0;
        let mut diff = Vec::with_capacity(n);
        for (m, &k) in grid.freqs().iter().enumerate() {
            let prop = Complex64::from_polar(1.0, s * japanese(k));
            let rhs = prop * (u0.coeffs[m] + iu * boundary[0].coeffs[m]) - iu * boundary[i].coeffs[m]
                + prop * cumulative[m][i];
            diff.push(st.u_hat.coeffs[m] - rhs);
        }
        let diff = SpectralField { grid: grid.clone(), coeffs: diff };
        out.push(ReducedEquationTerms {
            t: st.t,
            residual: diff.sobolev_norm(1.0),
            boundary: boundary[i].sobolev_norm(1.0),
            resonant: resonant_norm[i],
            cubic: cubic_norm[i],
        });
    }
    Ok(out)
}
