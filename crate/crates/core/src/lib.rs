//! Radial spectral laboratory for the quadratic Klein-Gordon equation
//!
//! ```text
//! u_tt - Δu + u = u²,   x ∈ R^d, d ∈ {1, 3, 4}
//! ```
//!
//! Everything in this crate is a pure function of its inputs and works with
//! `alloc` only, so the numerics can be embedded anywhere. File formats,
//! configuration and the command line live in the `qkg-lab` companion crate.
//!
//! The modules map onto the pieces of the scattering / blow-up picture:
//!
//! * [`spectral`]: radial grids, the discrete Hankel transform, Fourier
//!   multipliers, Littlewood–Paley projections and Besov / space-time norms.
//! * [`groundstate`]: the ground state `Q` of `-ΔQ + Q = Q^{p+1}` by shooting,
//!   and its Pohozaev / Gagliardo–Nirenberg identities.
//! * [`functionals`]: energy, stationary energy, sign and virial functionals
//!   and the below-threshold dichotomy classifier.
//! * [`normalform`]: frequency regions, modulation symbols, bilinear
//!   multipliers and the normal form transform with its reduced equation.
//! * [`evolution`]: Lawson RK4 time stepping of the first-order equation and
//!   the blow-up, Morawetz, `L³` and scattering trackers.
#![no_std]
// `!(x > 0.0)` is the idiom for rejecting NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cutoff;
mod error;
pub mod evolution;
pub mod functionals;
pub mod groundstate;
pub mod normalform;
pub mod ode;
pub mod quadrature;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
