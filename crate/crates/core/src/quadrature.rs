//! Gauss–Legendre rules, low-discrepancy sampling and small helpers for
//! integrating sampled time series.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..n {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x.push(mid - half * z);
        w.push(2.0 * half / ((1.0 - z * z) * dp * dp));
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Radical inverse of `i` in the given base (van der Corput / Halton).
pub fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Cumulative integral `∫_{t_0}^{t_i} f` of uniformly sampled data, fourth
/// order: each interval uses the cubic through its four nearest samples.
/// Fewer than four samples fall back to the trapezoidal rule.
pub fn cumulative_integral<T>(samples: &[T], dt: f64) -> Vec<T>
where
    T: Copy + core::ops::Add<Output = T> + core::ops::Mul<f64, Output = T> + Default,
{
    let n = samples.len();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(T::default());
    let f = samples;
    for i in 0..n - 1 {
        let piece = if n < 4 {
            (f[i] + f[i + 1]) * (0.5 * dt)
        } else if i == 0 {
            (f[0] * 9.0 + f[1] * 19.0 + f[2] * (-5.0) + f[3]) * (dt / 24.0)
        } else if i == n - 2 {
            (f[n - 1] * 9.0 + f[n - 2] * 19.0 + f[n - 3] * (-5.0) + f[n - 4]) * (dt / 24.0)
        } else {
            (f[i - 1] * (-1.0) + f[i] * 13.0 + f[i + 1] * 13.0 + f[i + 2] * (-1.0)) * (dt / 24.0)
        };
        let prev = out[i];
        out.push(prev + piece);
    }
    out
}

/// Five-point central first derivative at interior index `i`.
pub fn central_d1(y: &[f64], i: usize, h: f64) -> f64 {
    (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h)
}

/// Five-point central second derivative at interior index `i`.
pub fn central_d2(y: &[f64], i: usize, h: f64) -> f64 {
    (-y[i - 2] + 16.0 * y[i - 1] - 30.0 * y[i] + 16.0 * y[i + 1] - y[i + 2]) / (12.0 * h * h)
}
