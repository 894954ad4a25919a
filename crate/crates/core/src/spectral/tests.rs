use super::*;
use core::f64::consts::PI;
use libm::{exp, sqrt};

fn gaussian(grid: &RadialGrid) -> RadialField {
    RadialField::from_fn(grid, |r| exp(-0.5 * r * r)).unwrap()
}

fn bump(r: f64) -> f64 {
    if r < 6.0 {
        exp(-1.0 / (1.0 - (r / 6.0).powi(2))) * (1.0 + r)
    } else {
        0.0
    }
}

fn all_dims() -> [Dimension; 3] {
    [Dimension::One, Dimension::Three, Dimension::Four]
}

#[test]
fn rejects_bad_parameters() {
    assert!(matches!(Dimension::from_usize(2), Err(crate::Error::Parameter(_))));
    assert!(make_grid(Dimension::Three, -1.0, 64).is_err());
    assert!(make_grid(Dimension::Three, 10.0, 8).is_err());
}

#[test]
fn nodes_increase_inside_domain() {
    for d in all_dims() {
        let g = make_grid(d, 25.0, 64).unwrap();
        let r = g.nodes();
        assert!(r[0] > 0.0 && *r.last().unwrap() < 25.0);
        assert!(r.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn gaussian_quadrature_3d() {
    let g = make_grid(Dimension::Three, 40.0, 512).unwrap();
    let s = g.integrate_fn(|r| exp(-r * r));
    assert!((s - PI.powf(1.5)).abs() / PI.powf(1.5) < 1e-8);
}

#[test]
#[ignore = "a midpoint grid integrates e^{-2r} on the half line only to O(h²); see README"]
fn exponential_quadrature_1d() {
    let g = make_grid(Dimension::One, 40.0, 512).unwrap();
    let s = g.integrate_fn(|r| exp(-2.0 * r));
    assert!((s - 1.0).abs() < 1e-8);
}

#[test]
fn exponential_quadrature_1d_is_second_order() {
    // the even extension e^{-2|x|} has a kink at 0, which caps the order
    let err = |n| (make_grid(Dimension::One, 40.0, n).unwrap().integrate_fn(|r| exp(-2.0 * r)) - 1.0).abs();
    let ratio = err(512) / err(1024);
    assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
}

#[test]
fn gamma_quadrature_4d() {
    let g = make_grid(Dimension::Four, 30.0, 256).unwrap();
    let s = g.integrate_fn(|r| exp(-r)) / Dimension::Four.sphere_area();
    assert!((s - 6.0).abs() / 6.0 < 1e-6, "{s}");
}

#[test]
fn gaussian_is_self_dual() {
    for d in all_dims() {
        let g = make_grid(d, 30.0, 256).unwrap();
        let fh = transform(&gaussian(&g));
        for (&k, c) in g.freqs().iter().zip(&fh.coeffs) {
            let want = exp(-0.5 * k * k);
            assert!((c.re - want).abs() < 1e-6 * want.max(1e-3), "d={d} ρ={k}: {} vs {want}", c.re);
        }
    }
}

#[test]
fn round_trip_and_parseval() {
    for d in all_dims() {
        let g = make_grid(d, 20.0, 256).unwrap();
        let f = RadialField::from_fn(&g, bump).unwrap();
        let fh = transform(&f);
        let back = inverse_transform(&fh);
        let err = f.values.iter().zip(&back.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "d={d} round trip {err}");
        let (a, b) = (f.l2_norm(), fh.l2_norm());
        assert!((a - b).abs() / a < 1e-8, "d={d} parseval {a} {b}");
    }
}

#[test]
fn shape_mismatch_is_reported() {
    let a = make_grid(Dimension::Three, 20.0, 64).unwrap();
    let b = make_grid(Dimension::Three, 20.0, 128).unwrap();
    let fa = RadialField::zeros(&a);
    let fb = RadialField::zeros(&b);
    assert!(matches!(fa.add(&fb), Err(crate::Error::Shape(_))));
    assert!(RadialField::new(&a, alloc::vec![]).is_err());
}

#[test]
fn multipliers() {
    let g = make_grid(Dimension::Four, 20.0, 128).unwrap();
    let fh = transform(&gaussian(&g));
    assert_eq!(apply_multiplier(&fh, |_| 1.0).unwrap(), fh);
    let up = apply_multiplier(&fh, japanese).unwrap();
    let down = apply_multiplier(&up, |k| 1.0 / japanese(k)).unwrap();
    for (a, b) in down.coeffs.iter().zip(&fh.coeffs) {
        assert!((a - b).norm() < 1e-10);
    }
    assert!(matches!(apply_multiplier(&fh, |_| f64::NAN), Err(crate::Error::Numeric(_))));
}

#[test]
fn bessel_potential_scales_on_a_shell() {
    let g = make_grid(Dimension::Three, 40.0, 512).unwrap();
    let f = lp_project(&RadialField::from_fn(&g, |r| exp(-0.02 * r * r)).unwrap(), 3);
    let f =
        lp_project(&RadialField::from_fn(&g, |r| exp(-0.05 * r * r) * libm::cos(8.0 * r)).unwrap(), 3).add(&f).unwrap();
    for s in [-1.0, 0.5, 1.0] {
        let lhs = bessel_potential(&f, s).l2_norm();
        let rhs = libm::exp2(3.0 * s) * f.l2_norm();
        let ratio = lhs / rhs;
        let bound = libm::exp2(f64::abs(s));
        assert!(ratio <= bound && ratio >= 1.0 / bound, "s={s} ratio {ratio}");
    }
}

#[test]
fn littlewood_paley_partition() {
    for d in all_dims() {
        let g = make_grid(d, 30.0, 256).unwrap();
        let f = gaussian(&g);
        let w = g.dyadic_window();
        let mut sum = lp_project_below(&f, w.lo - 1);
        for k in w.iter() {
            sum = sum.add(&lp_project(&f, k)).unwrap();
        }
        let err = sum.sub(&f).unwrap().max_abs();
        assert!(err < 1e-8, "d={d} {err}");
        // starting the sum anywhere inside the window also telescopes
        let mut sum = lp_project_below(&f, -3);
        for k in -2..=w.hi {
            sum = sum.add(&lp_project(&f, k)).unwrap();
        }
        assert!(sum.sub(&f).unwrap().max_abs() < 1e-8);
    }
}

#[test]
fn littlewood_paley_disjoint_support() {
    let g = make_grid(Dimension::Three, 60.0, 512).unwrap();
    // data with frequencies in [2^4, 2^6]
    let fh = SpectralField::from_fn(&g, |k| crate::cutoff::shell_symbol(5, k));
    let f = inverse_transform(&fh);
    assert!(f.l2_norm() > 1.0);
    assert!(lp_project(&f, 0).l2_norm() < 1e-10);
    let p0 = lp_project(&gaussian(&g), 0).l2_norm();
    assert!(p0 > 0.0 && p0 <= gaussian(&g).l2_norm());
}

#[test]
fn besov_norms() {
    let g = make_grid(Dimension::Four, 30.0, 256).unwrap();
    let zero = RadialField::zeros(&g);
    assert_eq!(besov_norm(&zero, &BesovSpec::split(0.5, 1.0, 1.0)).unwrap(), 0.0);
    assert!(matches!(besov_norm(&zero, &BesovSpec::split(1.5, 0.0, 0.0)), Err(crate::Error::Parameter(_))));

    let fields = [
        gaussian(&g),
        RadialField::from_fn(&g, bump).unwrap(),
        RadialField::from_fn(&g, |r| exp(-0.1 * r * r) * libm::cos(3.0 * r)).unwrap(),
    ];
    for f in &fields {
        let b = besov_norm(f, &BesovSpec::single(0.5, 0.0)).unwrap();
        let l2 = f.l2_norm();
        assert!(b >= l2 / sqrt(2.0) && b <= l2 * sqrt(2.0), "{b} vs {l2}");
        // the split norm counts k = 0 twice, so it is at most twice as large
        let bs = besov_norm(f, &BesovSpec::split(0.5, 0.0, 0.0)).unwrap();
        assert!(bs >= b * (1.0 - 1e-12) && bs <= 2.0 * sqrt(2.0) * l2);
    }

    let wave = RadialField::from_fn(&g, |r| exp(-0.1 * r * r) * libm::cos(12.0 * r)).unwrap();
    let shell = lp_project(&wave, 3);
    let p3 = lp_project(&shell, 3).l2_norm();
    let b = besov_norm(&shell, &BesovSpec::split(0.5, 0.0, 1.0)).unwrap();
    let r = b / (8.0 * p3);
    assert!(r > 0.5 && r < 2.0, "{r}");

    // other Lebesgue exponents are finite and positive
    for r_inv in [0.0, 1.0 / 3.0, 1.0] {
        assert!(besov_norm(&fields[0], &BesovSpec::split(r_inv, 0.0, 1.0)).unwrap() > 0.0);
    }
}

#[test]
fn spacetime_norms() {
    let g = make_grid(Dimension::Three, 30.0, 256).unwrap();
    let f = gaussian(&g);
    let spec = SpaceTimeNormSpec::split(0.5, 0.5, 0.0, 1.0);
    let b = besov_norm(&f, &spec.besov()).unwrap();
    let traj = alloc::vec![f.clone(); 11];
    let v = spacetime_norm(&traj, 0.3, &spec).unwrap();
    assert!((v - sqrt(3.0) * b).abs() < 1e-10 * b);

    let traj: Vec<_> = (0..5).map(|i| f.scale(1.0 + i as f64)).collect();
    let sup = spacetime_norm(&traj, 1.0, &SpaceTimeNormSpec::split(0.0, 0.5, 0.0, 1.0)).unwrap();
    assert!((sup - 5.0 * b).abs() < 1e-10 * b);
    assert!(matches!(spacetime_norm(&[], 1.0, &spec), Err(crate::Error::Parameter(_))));
}

#[test]
fn free_evolution_keeps_besov_norm() {
    let g = make_grid(Dimension::Three, 40.0, 256).unwrap();
    let f = gaussian(&g);
    let spec = SpaceTimeNormSpec::energy();
    let b0 = besov_norm(&f, &spec.besov()).unwrap();
    let traj: Vec<_> = (0..6).map(|i| half_wave(&f, i as f64)).collect();
    let v = spacetime_norm(&traj, 1.0, &spec).unwrap();
    assert!((v - b0).abs() < 1e-8 * b0, "{v} vs {b0}");
}

#[test]
fn half_wave_group() {
    for d in all_dims() {
        let g = make_grid(d, 30.0, 256).unwrap();
        let f = gaussian(&g);
        let id = half_wave(&f, 0.0);
        assert!(id.sub(&f).unwrap().max_abs() < 1e-8);
        for s in [0.0, 1.0] {
            let a = f.sobolev_norm(s);
            let b = half_wave(&f, 5.0).sobolev_norm(s);
            assert!((a - b).abs() < 1e-10 * a);
        }
        let two_steps = half_wave_spectral(&half_wave_spectral(&transform(&f), 2.0), 3.0);
        let one = half_wave_spectral(&transform(&f), 5.0);
        for (a, b) in two_steps.coeffs.iter().zip(&one.coeffs) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn composite_norms_build() {
    let g = make_grid(Dimension::Four, 30.0, 128).unwrap();
    let traj: Vec<_> = (0..4).map(|i| half_wave(&gaussian(&g), i as f64 * 0.5)).collect();
    for norm in [
        CompositeNorm::strong_strichartz(4, 0.001).unwrap(),
        CompositeNorm::z_norm(4, 0.01).unwrap(),
        CompositeNorm::weak_strichartz(4, 0.01, 0.001).unwrap(),
    ] {
        let (v, parts) = norm.evaluate(&traj, 0.5).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert_eq!(parts.len(), norm.terms.len());
    }
    assert!(CompositeNorm::strong_strichartz(1, 0.0).is_err());
}
