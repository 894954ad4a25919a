//! Smooth cutoff `χ` and the Littlewood–Paley symbols built from it.
//!
//! `χ(s) = 1` for `s ≤ 1`, `0` for `s ≥ 2`, joined by the standard
//! `exp(-1/x)` bridge so that all derivatives are continuous.

use libm::{exp, exp2};

fn psi(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let p = exp(-1.0 / x);
    let x2 = x * x;
    (p, p / x2, p * (1.0 / (x2 * x2) - 2.0 / (x2 * x)))
}

/// `χ(s)` together with its first two derivatives.
pub fn chi_derivs(s: f64) -> (f64, f64, f64) {
    if s <= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    if s >= 2.0 {
        return (0.0, 0.0, 0.0);
    }
    let (a, da, dda) = psi(2.0 - s);
    let (b, db, ddb) = psi(s - 1.0);
    // chain rule for the reflected argument
    let (da, dda) = (-da, dda);
    let sum = a + b;
    let num = da * b - a * db;
    let dnum = dda * b - a * ddb;
    let c = a / sum;
    let d1 = num / (sum * sum);
    let d2 = dnum / (sum * sum) - 2.0 * num * (da + db) / (sum * sum * sum);
    (c, d1, d2)
}

/// `χ(s)`.
pub fn chi(s: f64) -> f64 {
    chi_derivs(s).0
}

/// Symbol of `P_{≤k}`: `χ(ρ / 2^k)`.
pub fn low_symbol(k: i32, rho: f64) -> f64 {
    chi(rho / exp2(k as f64))
}

/// Symbol of the dyadic block `P_k`: `χ(ρ/2^k) - χ(ρ/2^{k-1})`.
pub fn shell_symbol(k: i32, rho: f64) -> f64 {
    low_symbol(k, rho) - low_symbol(k - 1, rho)
}
