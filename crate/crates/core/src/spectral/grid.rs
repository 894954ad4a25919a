use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use libm::{cos, sin, sqrt};

use crate::error::bail;
use crate::special::{bessel_j, bessel_j1_zeros};
use crate::Result;

/// Spatial dimension of the radial problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    One,
    Three,
    Four,
}

impl Dimension {
    pub fn from_usize(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Dimension::One),
            3 => Ok(Dimension::Three),
            4 => Ok(Dimension::Four),
            _ => bail!(Parameter, "dimension must be 1, 3 or 4, got {d}"),
        }
    }

    pub fn as_usize(self) -> usize {
        match self {
            Dimension::One => 1,
            Dimension::Three => 3,
            Dimension::Four => 4,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.as_usize() as f64
    }

    /// Surface area of the unit sphere `S^{d-1}` (for `d = 1`, the two points ±1).
    pub fn sphere_area(self) -> f64 {
        match self {
            Dimension::One => 2.0,
            Dimension::Three => 4.0 * PI,
            Dimension::Four => 2.0 * PI * PI,
        }
    }

    /// Radial Fourier kernel `K(x) = x^{-ν} J_ν(x)` with `ν = d/2 - 1`, normalised
    /// so that `f̂(ρ) = ∫₀^∞ f(r) K(ρr) r^{d-1} dr` is the unitary transform.
    pub fn kernel(self, x: f64) -> f64 {
        match self {
            Dimension::One => sqrt(2.0 / PI) * cos(x),
            Dimension::Three => {
                if x.abs() < 1e-4 {
                    sqrt(2.0 / PI) * (1.0 - x * x / 6.0)
                } else {
                    sqrt(2.0 / PI) * sin(x) / x
                }
            }
            Dimension::Four => {
                if x.abs() < 1e-4 {
                    0.5 - x * x / 16.0
                } else {
                    bessel_j(1, x) / x
                }
            }
        }
    }

    /// `K'(x) = -x^{-ν} J_{ν+1}(x)`.
    pub fn kernel_derivative(self, x: f64) -> f64 {
        match self {
            Dimension::One => -sqrt(2.0 / PI) * sin(x),
            Dimension::Three => {
                if x.abs() < 1e-3 {
                    sqrt(2.0 / PI) * (-x / 3.0 + x * x * x / 30.0)
                } else {
                    sqrt(2.0 / PI) * (cos(x) / x - sin(x) / (x * x))
                }
            }
            Dimension::Four => {
                if x.abs() < 1e-4 {
                    -x / 8.0
                } else {
                    -bessel_j(2, x) / x
                }
            }
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_usize())
    }
}

/// Dyadic indices `k` for which `P_k` can be nonzero on the frequency grid.
/// On the grid, `Σ_{k=lo}^{hi} P_k` is exactly the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicWindow {
    pub lo: i32,
    pub hi: i32,
}

impl DyadicWindow {
    pub fn iter(self) -> impl Iterator<Item = i32> {
        self.lo..=self.hi
    }
}

pub(crate) struct GridData {
    pub dim: Dimension,
    pub r_max: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub freqs: Vec<f64>,
    pub freq_weights: Vec<f64>,
    /// forward transform, row-major `N × N`, `A[m][n]`
    pub fwd: Vec<f64>,
    /// inverse transform, `B[n][m]`
    pub inv: Vec<f64>,
    /// radial derivative of the inverse transform, `D[n][m]`
    pub deriv: Vec<f64>,
}

/// Collocation grid in `r` together with its companion frequency grid and the
/// discrete Hankel transform matrices.
///
/// Cloning is cheap: the data is shared.
///
/// * `d = 1`: half-sample grid, the transform is the orthogonal DCT-IV.
/// * `d = 3`: uniform grid, the transform is the orthogonal DST-I of `r f(r)`.
/// * `d = 4`: quasi-discrete Hankel transform at the zeros of `J_1`.
#[derive(Clone)]
pub struct RadialGrid(pub(crate) Arc<GridData>);

impl fmt::Debug for RadialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialGrid")
            .field("d", &self.0.dim.as_usize())
            .field("r_max", &self.0.r_max)
            .field("n", &self.0.nodes.len())
            .finish()
    }
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.dim == other.0.dim && self.0.r_max == other.0.r_max && self.0.nodes.len() == other.0.nodes.len())
    }
}

/// Build a grid for dimension `d` on `[0, r_max)` with `n` nodes.
pub fn make_grid(d: Dimension, r_max: f64, n: usize) -> Result<RadialGrid> {
    RadialGrid::new(d, r_max, n)
}

impl RadialGrid {
    pub fn new(d: Dimension, r_max: f64, n: usize) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            bail!(Parameter, "r_max must be positive and finite, got {r_max}");
        }
        if n < 16 {
            bail!(Parameter, "need at least 16 nodes, got {n}");
        }
        let c = d.sphere_area();
        let (nodes, weights, freqs, freq_weights) = match d {
            Dimension::One => {
                let h = r_max / n as f64;
                let nodes: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
                let freqs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * PI / r_max).collect();
                (nodes, vec![c * h; n], freqs, vec![c * PI / r_max; n])
            }
            Dimension::Three => {
                let h = r_max / (n + 1) as f64;
                let dk = PI / r_max;
                let nodes: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
                let freqs: Vec<f64> = (1..=n).map(|i| i as f64 * dk).collect();
                let w = nodes.iter().map(|r| c * r * r * h).collect();
                let fw = freqs.iter().map(|k| c * k * k * dk).collect();
                (nodes, w, freqs, fw)
            }
            Dimension::Four => {
                let zeros = bessel_j1_zeros(n + 1);
                let s = zeros[n];
                let mut nodes = Vec::with_capacity(n);
                let mut freqs = Vec::with_capacity(n);
                let mut w = Vec::with_capacity(n);
                let mut fw = Vec::with_capacity(n);
                for &j in &zeros[..n] {
                    let j2 = bessel_j(2, j);
                    let r = j * r_max / s;
                    let rho = j / r_max;
                    nodes.push(r);
                    freqs.push(rho);
                    w.push(c * r * r * 2.0 * r_max * r_max / (s * s * j2 * j2));
                    fw.push(c * rho * rho * 2.0 / (r_max * r_max * j2 * j2));
                }
                (nodes, w, freqs, fw)
            }
        };
        let mut fwd = vec![0.0; n * n];
        let mut inv = vec![0.0; n * n];
        let mut deriv = vec![0.0; n * n];
        for m in 0..n {
            for i in 0..n {
                let x = freqs[m] * nodes[i];
                let k = d.kernel(x);
                fwd[m * n + i] = k * weights[i] / c;
                inv[i * n + m] = k * freq_weights[m] / c;
                deriv[i * n + m] = freqs[m] * d.kernel_derivative(x) * freq_weights[m] / c;
            }
        }
        Ok(RadialGrid(Arc::new(GridData { dim: d, r_max, nodes, weights, freqs, freq_weights, fwd, inv, deriv })))
    }

    pub fn dim(&self) -> Dimension {
        self.0.dim
    }

    pub fn r_max(&self) -> f64 {
        self.0.r_max
    }

    pub fn len(&self) -> usize {
        self.0.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nodes.is_empty()
    }

    /// Radial collocation nodes `r_i`.
    pub fn nodes(&self) -> &[f64] {
        &self.0.nodes
    }

    /// Weights with `∫_{R^d} f dx ≈ Σ w_i f(r_i)`.
    pub fn weights(&self) -> &[f64] {
        &self.0.weights
    }

    /// Frequency nodes `ρ_j`.
    pub fn freqs(&self) -> &[f64] {
        &self.0.freqs
    }

    /// Weights with `∫_{R^d} g(|ξ|) dξ ≈ Σ w'_j g(ρ_j)`.
    pub fn freq_weights(&self) -> &[f64] {
        &self.0.freq_weights
    }

    /// Largest resolvable frequency.
    pub fn rho_max(&self) -> f64 {
        *self.0.freqs.last().unwrap()
    }

    /// `∫_{R^d} f dx` for real samples.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.0.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// `∫_{R^d} f(r) dx` for a function evaluated at the nodes.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.0.nodes.iter().zip(&self.0.weights).map(|(&r, w)| w * f(r)).sum()
    }

    pub fn dyadic_window(&self) -> DyadicWindow {
        let lo = libm::floor(libm::log2(self.0.freqs[0])) as i32;
        let hi = libm::ceil(libm::log2(self.rho_max())) as i32 + 1;
        DyadicWindow { lo, hi }
    }

    pub(crate) fn check_same(&self, other: &RadialGrid) -> Result<()> {
        if self != other {
            bail!(Shape, "fields live on different grids ({:?} vs {:?})", self, other);
        }
        Ok(())
    }

    /// Real forward transform `x ↦ A x` (spatial samples to coefficients).
    pub fn forward_real(&self, x: &[f64], out: &mut [f64]) {
        matvec(&self.0.fwd, x, out);
    }

    /// Real inverse transform `y ↦ B y`.
    pub fn inverse_real(&self, y: &[f64], out: &mut [f64]) {
        matvec(&self.0.inv, y, out);
    }

    /// Radial derivative of the inverse transform: `∂_r (B y)` at the nodes.
    pub fn derivative_real(&self, y: &[f64], out: &mut [f64]) {
        matvec(&self.0.deriv, y, out);
    }
}

/// Dense row-major matrix–vector product, `out = M x`.
pub(crate) fn matvec(m: &[f64], x: &[f64], out: &mut [f64]) {
    let n = x.len();
    debug_assert_eq!(m.len(), n * out.len());
    for (row, o) in m.chunks_exact(n).zip(out.iter_mut()) {
        *o = dot(row, x);
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut s: f64 = acc.iter().sum();
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}
