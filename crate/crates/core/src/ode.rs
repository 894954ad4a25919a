//! Adaptive Dormand–Prince 5(4) integrator for small systems.

use alloc::vec::Vec;

use crate::error::bail;
use crate::Result;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights are the last row of A; these are fifth minus fourth
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(tol: f64) -> Self {
        Dopri5 { rtol: tol, atol: tol, max_steps: 1_000_000 }
    }
}

/// Result of [`Dopri5::integrate`].
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    /// States at the requested output times that were reached.
    pub samples: Vec<[f64; N]>,
    /// Time and state where integration stopped.
    pub t_end: f64,
    pub y_end: [f64; N],
    /// `true` when the event function stopped the integration early.
    pub halted: bool,
}

impl Dopri5 {
    /// Integrate `y' = f(t, y)` from `(t0, y0)` through the increasing output
    /// times `outputs`, stopping after the first accepted step at which
    /// `event(t, y)` is true.
    pub fn integrate<const N: usize>(
        &self,
        f: impl Fn(f64, &[f64; N]) -> [f64; N],
        t0: f64,
        y0: [f64; N],
        outputs: &[f64],
        mut event: impl FnMut(f64, &[f64; N]) -> bool,
    ) -> Result<Solution<N>> {
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = 1e-3 * outputs.last().map_or(1.0, |te| (te - t0).abs().max(1e-6));
        let mut samples = Vec::with_capacity(outputs.len());
        let mut steps = 0;
        for &target in outputs {
            if target < t {
                bail!(Parameter, "output times must be increasing and after t0");
            }
            while t < target {
                steps += 1;
                if steps > self.max_steps {
                    bail!(Convergence, "step limit reached at t = {t}");
                }
                let last = h >= target - t;
                let hs = if last { target - t } else { h };
                let (y_new, k7, err) = self.try_step(&f, t, &y, &k1, hs);
                if !err.is_finite() {
                    h = 0.25 * hs;
                    if h < 1e-14 * t.abs().max(1.0) {
                        bail!(Numeric, "non-finite state at t = {t}");
                    }
                    continue;
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
                if err <= 1.0 {
                    t = if last { target } else { t + hs };
                    y = y_new;
                    k1 = k7;
                    if event(t, &y) {
                        return Ok(Solution { samples, t_end: t, y_end: y, halted: true });
                    }
                    if !last {
                        h = hs * fac;
                    }
                } else {
                    h = hs * fac.min(1.0);
                }
            }
            samples.push(y);
        }
        Ok(Solution { samples, t_end: t, y_end: y, halted: false })
    }

    fn try_step<const N: usize>(
        &self,
        f: &impl Fn(f64, &[f64; N]) -> [f64; N],
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> ([f64; N], [f64; N], f64) {
        let mut k = [[0.0; N]; 7];
        k[0] = *k1;
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = *y;
        for (j, kj) in k.iter().enumerate().take(6) {
            for i in 0..N {
                y5[i] += h * A[6][j] * kj[i];
            }
        }
        let mut err = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
            err += (h * e / sc) * (h * e / sc);
        }
        (y5, k[6], libm::sqrt(err / N as f64))
    }
}
