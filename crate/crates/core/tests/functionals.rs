use std::sync::OnceLock;

use proptest::prelude::*;
use qkg_core::functionals::{
    classify, energy, grad_sq, mass_sq, sign_functional_k, stationary_energy_j, virial_k, Nonlinearity, Region,
    VariationalParams,
};
use qkg_core::groundstate::{solve_ground_state, GroundState};
use qkg_core::spectral::{Dimension, RadialField, RadialGrid};
use qkg_core::Error;

fn q4() -> &'static GroundState {
    static Q: OnceLock<GroundState> = OnceLock::new();
    Q.get_or_init(|| {
        let g = RadialGrid::new(Dimension::Four, 40.0, 256).unwrap();
        solve_ground_state(&g, 1, 1e-6).unwrap()
    })
}

fn gaussian(g: &RadialGrid, amp: f64, w: f64) -> RadialField {
    RadialField::from_fn(g, |r| amp * (-r * r / (w * w)).exp()).unwrap()
}

#[test]
fn nonlinearity_table() {
    let q = Nonlinearity::Quadratic;
    assert_eq!(q.f(3.0), 9.0);
    assert_eq!(q.antiderivative(3.0), 9.0);
    assert_eq!(q.mass_sq(), 1.0);
    // f = u^{p+1}
    assert_eq!(Nonlinearity::power(3).f(-2.0), 16.0);
    assert_eq!(Nonlinearity::power(2).f(-2.0), -8.0);
    assert_eq!(Nonlinearity::power(2).antiderivative(2.0), 4.0);
    assert_eq!(Nonlinearity::power(1), Nonlinearity::Quadratic);
    assert_eq!(Nonlinearity::Free.f(5.0), 0.0);
    assert_eq!(Nonlinearity::Phi4.mass_sq(), 2.0);
    assert_eq!(Nonlinearity::Quadratic.exponent(), Some(1));
}

#[test]
fn zero_field_has_zero_functionals() {
    let g = RadialGrid::new(Dimension::Four, 20.0, 64).unwrap();
    let z = RadialField::zeros(&g);
    assert_eq!(energy(&z, &z, Nonlinearity::Quadratic).unwrap(), 0.0);
    assert_eq!(sign_functional_k(&z, VariationalParams::default(), Nonlinearity::Quadratic), 0.0);
    assert_eq!(virial_k(&z).unwrap(), 0.0);
}

#[test]
fn mismatched_grids_are_rejected() {
    let a = RadialGrid::new(Dimension::Four, 20.0, 64).unwrap();
    let b = RadialGrid::new(Dimension::Four, 20.0, 80).unwrap();
    let r = energy(&RadialField::zeros(&a), &RadialField::zeros(&b), Nonlinearity::Quadratic);
    assert!(matches!(r, Err(Error::Shape(_))));
}

#[test]
fn ground_state_functionals() {
    let q = q4();
    let nl = Nonlinearity::Quadratic;
    let m = mass_sq(&q.profile);
    let j = stationary_energy_j(&q.profile, nl);
    assert!((j / m - 0.5).abs() < 1e-4);
    assert!(sign_functional_k(&q.profile, VariationalParams::default(), nl).abs() < 1e-4 * m);
    assert!(virial_k(&q.profile).unwrap().abs() < 1e-4 * m);
    assert!((grad_sq(&q.profile) / m - 2.0).abs() < 1e-4);
}

#[test]
fn classification_of_the_scaled_ground_state() {
    let q = q4();
    let g = &q.profile.grid;
    let zero = RadialField::zeros(g);
    let m = q.norms.mass_sq;
    for lam in [0.6, 0.8, 0.9, 1.1, 1.2, 1.5] {
        let v = classify(&q.profile.scale(lam), &zero, q).unwrap();
        let want = if lam < 1.0 { Region::KPlus } else { Region::KMinus };
        if lam < 1.0 {
            assert_eq!(v.region, want, "λ = {lam}");
            assert!(v.k10 > 0.0 && v.k_virial > 0.0);
        } else {
            // E(λQ) < E(Q) holds for λ > 1 as well
            assert_eq!(v.region, want, "λ = {lam}");
            assert!(v.k10 < 0.0 && v.k_virial < 0.0);
        }
        assert!((v.mass_ratio - lam).abs() < 1e-12);
        let e = m * (1.5 * lam * lam - lam * lam * lam);
        assert!((v.energy - e).abs() < 1e-4 * m, "λ = {lam}: {} vs {e}", v.energy);
    }
    let v = classify(&q.profile, &zero, q).unwrap();
    assert_eq!(v.region, Region::Indeterminate);
    // energy above the threshold
    let kick = gaussian(g, 3.0, 2.0);
    assert_eq!(classify(&q.profile.scale(0.5), &kick, q).unwrap().region, Region::Indeterminate);
}

#[test]
fn classifier_preconditions() {
    let g3 = RadialGrid::new(Dimension::Three, 40.0, 128).unwrap();
    let q3 = solve_ground_state(&g3, 1, 1e-6).unwrap();
    let z = RadialField::zeros(&g3);
    assert!(matches!(classify(&z, &z, &q3), Err(Error::Parameter(_))));
    assert!(virial_k(&z).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn antiderivative_matches_f(u in -3.0f64..3.0, p in 1u32..5) {
        for nl in [Nonlinearity::power(p), Nonlinearity::Quadratic, Nonlinearity::Phi4] {
            let h = 1e-5;
            let fd = (nl.antiderivative(u + h) - nl.antiderivative(u - h)) / (2.0 * h);
            prop_assert!((fd - nl.f(u)).abs() < 1e-7 * (1.0 + nl.f(u).abs()));
        }
    }

    #[test]
    fn k_is_the_scaling_derivative_of_j(amp in 0.2f64..3.0, w in 1.0f64..3.0, alpha in 0.0f64..2.0, beta in -1.0f64..1.0) {
        let g = RadialGrid::new(Dimension::Four, 30.0, 128).unwrap();
        let nl = Nonlinearity::Quadratic;
        let j_at = |lam: f64| {
            let a = amp * (alpha * lam).exp();
            let s = (-beta * lam).exp();
            let f = RadialField::from_fn(&g, |r| a * (-(s * r) * (s * r) / (w * w)).exp()).unwrap();
            stationary_energy_j(&f, nl)
        };
        let h = 1e-4;
        let fd = (j_at(-2.0 * h) - 8.0 * j_at(-h) + 8.0 * j_at(h) - j_at(2.0 * h)) / (12.0 * h);
        let k = sign_functional_k(&gaussian(&g, amp, w), VariationalParams { alpha, beta }, nl);
        prop_assert!((fd - k).abs() < 1e-7 * (1.0 + k.abs()), "fd {} vs k {}", fd, k);
    }

    #[test]
    fn below_threshold_scalings_keep_their_side(lam in 0.05f64..0.98) {
        let q = q4();
        let z = RadialField::zeros(&q.profile.grid);
        let v = classify(&q.profile.scale(lam), &z, q).unwrap();
        prop_assert_eq!(v.region, Region::KPlus);
        prop_assert!(v.k10 > 0.0);
        let v = classify(&q.profile.scale(2.0 - lam), &z, q).unwrap();
        prop_assert_eq!(v.region, Region::KMinus);
        prop_assert!(v.k10 < 0.0);
    }
}
