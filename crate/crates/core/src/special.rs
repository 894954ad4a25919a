//! Bessel functions of the first kind (integer order), the modified Bessel
//! function `K_ν`, and zeros of `J_1`.
//!
//! Only the orders the radial transforms need are supported: `J_0`, `J_1`,
//! `J_2` to full double precision on `[0, ∞)`, and `K_ν` for real `ν ≥ 0`.

use core::f64::consts::PI;
use libm::{cos, exp, sin, sqrt};

/// Below this argument the power series is used.
const SERIES_MAX: f64 = 2.0;
/// Above this argument the Hankel asymptotic expansion is used.
const ASYMPTOTIC_MIN: f64 = 25.0;

/// `J_n(x)` for `n ∈ {0, 1, 2, 3}` and `x ≥ 0`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    assert!(n <= 3, "bessel_j supports orders 0..=3");
    let ax = x.abs();
    let v = if ax <= SERIES_MAX {
        series_j(n, ax)
    } else if ax < ASYMPTOTIC_MIN {
        miller_j(n, ax)
    } else {
        hankel_j(n, ax)
    };
    // J_n(-x) = (-1)^n J_n(x)
    if x < 0.0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}

fn series_j(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..60 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Backward recurrence normalised by `J_0 + 2 Σ J_{2k} = 1`.
fn miller_j(n: u32, x: f64) -> f64 {
    let start = 2 * (((1.2 * x) as usize + 40) / 2);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        if k as u32 == n {
            wanted = cur;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    norm += cur;
    if n == 0 {
        wanted = cur;
    }
    wanted / norm
}

fn hankel_j(n: u32, x: f64) -> f64 {
    let (p, q) = hankel_pq(n as f64, x);
    // ω = x - (n/2 + 1/4)π, expanded to keep the large argument exact
    let phase = (0.5 * n as f64 + 0.25) * PI;
    let (sx, cx) = (sin(x), cos(x));
    let (sp, cp) = (sin(phase), cos(phase));
    let cos_w = cx * cp + sx * sp;
    let sin_w = sx * cp - cx * sp;
    sqrt(2.0 / (PI * x)) * (p * cos_w - q * sin_w)
}

fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

/// Modified Bessel function `K_ν(x)` for `x > 0`, from
/// `K_ν(x) = ∫₀^∞ exp(-x cosh t) cosh(νt) dt` by the trapezoidal rule,
/// which converges geometrically for this integrand.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k needs x > 0");
    let h = 0.05;
    // the integrand is below e^{-40} relative to its peak past this point
    let mut sum = 0.5 * exp(-x);
    let mut t = h;
    loop {
        let c = libm::cosh(t);
        let term = exp(-x * c) * libm::cosh(nu * t);
        sum += term;
        if x * (c - 1.0) > 45.0 + nu * t {
            break;
        }
        t += h;
    }
    sum * h
}

/// `k`-th positive zero of `J_1` (1-based).
pub fn bessel_j1_zero(k: usize) -> f64 {
    assert!(k >= 1);
    let beta = (k as f64 + 0.25) * PI;
    let mu = 4.0;
    let b8 = 8.0 * beta;
    let mut x = beta
        - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8)
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8 * b8 * b8 * b8 * b8);
    for _ in 0..8 {
        let j1 = bessel_j(1, x);
        let dj1 = bessel_j(0, x) - j1 / x;
        let dx = j1 / dj1;
        x -= dx;
        if dx.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

/// First `n` positive zeros of `J_1`.
pub fn bessel_j1_zeros(n: usize) -> alloc::vec::Vec<f64> {
    (1..=n).map(bessel_j1_zero).collect()
}
