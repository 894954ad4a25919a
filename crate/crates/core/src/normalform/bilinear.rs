//! Radial bilinear Fourier multipliers
//! `T_σ(f,g)^(ξ) = (2π)^{-d/2} ∫ σ(|ξ|, |ξ-η|, |η|) f̂(ξ-η) ĝ(η) dη`.
//!
//! The η-integral is a tensor rule: frequency nodes in `|η|` times a Gauss
//! rule in the angle between `ξ` and `η`. `f̂(|ξ-η|)` at off-grid points comes
//! from an oversampled table of the continuous transform plus six-point
//! Lagrange interpolation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{AnalysisParams, ModulationSpec};
use crate::cutoff::low_symbol;
use crate::error::bail;
use crate::quadrature::gauss_legendre;
use crate::spectral::{inverse_transform, transform, Dimension, RadialField, RadialGrid, SpectralField};
use crate::{Complex64, Result};

/// Angular nodes used unless stated otherwise.
pub const DEFAULT_ANGLES: usize = 64;
/// Oversampling of the interpolation table relative to the mean node spacing.
const OVERSAMPLE: usize = 8;

/// Off-grid values of one operand's transform.
struct Table {
    values: Vec<Complex64>,
    /// `f̂(a)` is taken as zero beyond this frequency.
    support: f64,
}

/// Precomputed quadrature data for bilinear multipliers on one grid.
pub struct BilinearEngine {
    grid: RadialGrid,
    cos: Vec<f64>,
    ang_w: Vec<f64>,
    eta_w: Vec<f64>,
    h: f64,
    rows: usize,
    /// `rows × N`, maps spatial samples to table values
    table_mat: Vec<f64>,
    norm: f64,
}

impl BilinearEngine {
    pub fn new(grid: &RadialGrid, angles: usize) -> Result<Self> {
        if angles < 2 {
            bail!(Parameter, "need at least two angular nodes");
        }
        let d = grid.dim();
        let (cos, ang_w) = match d {
            Dimension::One => (vec![1.0, -1.0], vec![1.0, 1.0]),
            Dimension::Three => {
                let (c, w) = gauss_legendre(angles, -1.0, 1.0);
                (c, w.iter().map(|w| 2.0 * PI * w).collect())
            }
            Dimension::Four => {
                // Gauss rule for the weight sin²θ (Chebyshev, second kind)
                let n1 = (angles + 1) as f64;
                let c = (1..=angles).map(|k| libm::cos(k as f64 * PI / n1)).collect();
                let w = (1..=angles)
                    .map(|k| {
                        let s = libm::sin(k as f64 * PI / n1);
                        4.0 * PI * PI / n1 * s * s
                    })
                    .collect();
                (c, w)
            }
        };
        let c_d = d.sphere_area();
        let eta_w = grid.freq_weights().iter().map(|w| w / c_d).collect();
        let n = grid.len();
        let h = grid.rho_max() / (OVERSAMPLE * n) as f64;
        let rows = OVERSAMPLE * n + 4;
        let mut table_mat = vec![0.0; rows * n];
        for i in 0..rows {
            let a = i as f64 * h;
            for (j, (&r, &w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
                table_mat[i * n + j] = d.kernel(a * r) * w / c_d;
            }
        }
        let norm = libm::pow(2.0 * PI, -0.5 * d.as_f64());
        Ok(BilinearEngine { grid: grid.clone(), cos, ang_w, eta_w, h, rows, table_mat, norm })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn angles(&self) -> usize {
        self.cos.len()
    }

    fn support_of(&self, coeffs: &[Complex64]) -> f64 {
        let freqs = self.grid.freqs();
        match coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)) {
            None => 0.0,
            Some(i) if i + 1 < freqs.len() => freqs[i + 1],
            Some(_) => self.grid.rho_max(),
        }
    }

    fn table(&self, f: &SpectralField) -> Table {
        let support = self.support_of(&f.coeffs);
        let spatial = inverse_transform(f);
        let n = self.grid.len();
        let used = ((support / self.h) as usize + 4).min(self.rows);
        let mut values = vec![Complex64::new(0.0, 0.0); self.rows];
        for (i, v) in values.iter_mut().enumerate().take(used) {
            let row = &self.table_mat[i * n..(i + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, s) in row.iter().zip(&spatial.values) {
                acc += s * m;
            }
            *v = acc;
        }
        Table { values, support }
    }

    #[inline]
    fn interp(&self, t: &Table, a: f64) -> Complex64 {
        let x = a / self.h;
        let i0 = libm::floor(x) as isize;
        let s = x - i0 as f64;
        // Lagrange basis on the nodes -2..=3
        let (sm2, sm1, s0, s1, s2, s3) = (s + 2.0, s + 1.0, s, s - 1.0, s - 2.0, s - 3.0);
        let w = [
            -sm1 * s0 * s1 * s2 * s3 / 120.0,
            sm2 * s0 * s1 * s2 * s3 / 24.0,
            -sm2 * sm1 * s1 * s2 * s3 / 12.0,
            sm2 * sm1 * s0 * s2 * s3 / 12.0,
            -sm2 * sm1 * s0 * s1 * s3 / 24.0,
            sm2 * sm1 * s0 * s1 * s2 / 120.0,
        ];
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, wj) in w.iter().enumerate() {
            // the transform of a radial function is even in the frequency
            let idx = (i0 + j as isize - 2).unsigned_abs();
            if idx < self.rows {
                acc += t.values[idx] * *wj;
            }
        }
        acc
    }

    /// `Σ_ξ-nodes ∫ combine(ξ, |ξ-η|, |η|, f̂(|ξ-η|), ĝ(|η|) dη-weight)`.
    fn accumulate(
        &self,
        ta: &Table,
        gb: &[Complex64],
        gb_support: f64,
        combine: &impl Fn(f64, f64, f64, Complex64, Complex64) -> Complex64,
    ) -> Vec<Complex64> {
        let freqs = self.grid.freqs();
        let reach = ta.support + gb_support;
        let active: Vec<usize> = (0..gb.len()).filter(|&i| gb[i] != Complex64::new(0.0, 0.0)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); freqs.len()];
        for (o, &xi) in out.iter_mut().zip(freqs) {
            if xi > reach {
                break;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for &n in &active {
                let b = freqs[n];
                let gv = gb[n] * self.eta_w[n];
                for (&c, &w) in self.cos.iter().zip(&self.ang_w) {
                    let a = libm::sqrt((xi * xi + b * b - 2.0 * xi * b * c).max(0.0));
                    if a > ta.support {
                        continue;
                    }
                    let fa = self.interp(ta, a);
                    acc += combine(xi, a, b, fa, gv) * w;
                }
            }
            *o = acc * self.norm;
        }
        out
    }

    /// Symmetrised evaluation: the average of the rule with `f` interpolated
    /// and the rule with `g` interpolated (the two agree for exact integrals).
    fn symmetric(
        &self,
        f: &SpectralField,
        g: &SpectralField,
        combine: impl Fn(f64, f64, f64, Complex64, Complex64) -> Complex64,
    ) -> Result<SpectralField> {
        self.grid.check_same(&f.grid)?;
        self.grid.check_same(&g.grid)?;
        let tf = self.table(f);
        let tg = self.table(g);
        let one = self.accumulate(&tf, &g.coeffs, tg.support, &combine);
        let swapped = |xi: f64, a: f64, b: f64, ga: Complex64, fb: Complex64| combine(xi, b, a, fb, ga);
        let two = self.accumulate(&tg, &f.coeffs, tf.support, &swapped);
        let coeffs: Vec<Complex64> = one.iter().zip(&two).map(|(x, y)| (x + y) * 0.5).collect();
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            bail!(Numeric, "bilinear symbol is singular on the quadrature set");
        }
        Ok(SpectralField { grid: self.grid.clone(), coeffs })
    }

    /// Multiplier with symbol `σ(|ξ|, |ξ-η|, |η|)`, on coefficients.
    pub fn apply_spectral(
        &self,
        symbol: impl Fn(f64, f64, f64) -> Complex64,
        f: &SpectralField,
        g: &SpectralField,
    ) -> Result<SpectralField> {
        self.symmetric(f, g, |xi, a, b, fa, gb| symbol(xi, a, b) * fa * gb)
    }

    /// Multiplier with symbol `σ(|ξ|, |ξ-η|, |η|)`.
    pub fn apply(
        &self,
        symbol: impl Fn(f64, f64, f64) -> Complex64,
        f: &RadialField,
        g: &RadialField,
    ) -> Result<RadialField> {
        Ok(inverse_transform(&self.apply_spectral(symbol, &transform(f), &transform(g))?))
    }

    fn low(&self, f: &SpectralField, params: &AnalysisParams) -> SpectralField {
        let k = params.ll_index();
        let coeffs = self.grid.freqs().iter().zip(&f.coeffs).map(|(&rho, c)| c * low_symbol(k, rho)).collect();
        SpectralField { grid: f.grid.clone(), coeffs }
    }

    /// `Ω_ι(f, g)` on coefficients.
    pub fn omega_spectral(
        &self,
        f: &SpectralField,
        g: &SpectralField,
        spec: ModulationSpec,
        params: &AnalysisParams,
    ) -> Result<SpectralField> {
        let (fl, gl) = (self.low(f, params), self.low(g, params));
        self.apply_spectral(|xi, a, b| Complex64::new(0.0, -1.0 / spec.phi(xi, a, b)), &fl, &gl)
    }

    pub fn omega(
        &self,
        f: &RadialField,
        g: &RadialField,
        spec: ModulationSpec,
        params: &AnalysisParams,
    ) -> Result<RadialField> {
        Ok(inverse_transform(&self.omega_spectral(&transform(f), &transform(g), spec, params)?))
    }

    /// `Σ_ι c_ι Ω_ι(f^{ι₁}, g^{ι₂})` with `f^+ = f`, `f^- = f̄`, in one pass.
    /// The order of `c` is [`ModulationSpec::ALL`].
    pub fn omega_sum(
        &self,
        f: &SpectralField,
        g: &SpectralField,
        c: [f64; 4],
        params: &AnalysisParams,
    ) -> Result<SpectralField> {
        let (fl, gl) = (self.low(f, params), self.low(g, params));
        self.symmetric(&fl, &gl, |xi, a, b, fa, gb| {
            let base = -japanese_of(xi);
            let (pa, pb) = (japanese_of(a), japanese_of(b));
            let fm = fa.conj();
            let gm = gb.conj();
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, spec) in ModulationSpec::ALL.iter().enumerate() {
                if c[k] == 0.0 {
                    continue;
                }
                let phi = base + spec.iota1.value() * pa + spec.iota2.value() * pb;
                let x = if spec.iota1.value() > 0.0 { fa } else { fm };
                let y = if spec.iota2.value() > 0.0 { gb } else { gm };
                acc += x * y * (c[k] / phi);
            }
            // 1/(iΦ) = -i/Φ
            Complex64::new(acc.im, -acc.re)
        })
    }
}

#[inline]
fn japanese_of(x: f64) -> f64 {
    libm::sqrt(1.0 + x * x)
}

/// [`BilinearEngine::apply`] with a freshly built engine and the default angular rule.
pub fn bilinear_apply(
    symbol: impl Fn(f64, f64, f64) -> Complex64,
    f: &RadialField,
    g: &RadialField,
) -> Result<RadialField> {
    BilinearEngine::new(&f.grid, DEFAULT_ANGLES)?.apply(symbol, f, g)
}
