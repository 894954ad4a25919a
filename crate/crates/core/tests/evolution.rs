use qkg_core::evolution::{
    detect_blowup, evolve, l3_track, morawetz_track, scattering_extract, step, MorawetzWeights, RunVerdict, SimState,
    Stepper, Trackers, Trajectory,
};
use qkg_core::functionals::{energy, Nonlinearity};
use qkg_core::groundstate::solve_ground_state;
use qkg_core::normalform::{normal_form_residual, AnalysisParams};
use qkg_core::spectral::{half_wave, Dimension, RadialField, RadialGrid, SpectralField};
use qkg_core::{Complex64, Error};

fn grid(d: Dimension, r: f64, n: usize) -> RadialGrid {
    RadialGrid::new(d, r, n).unwrap()
}

fn bump(g: &RadialGrid, amp: f64, w: f64) -> RadialField {
    RadialField::from_fn(g, |r| amp * (-r * r / (w * w)).exp()).unwrap()
}

fn max_diff(a: &RadialField, b: &RadialField) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn h1_diff(a: &SimState, b: &SimState) -> f64 {
    let coeffs = a.u_hat.coeffs.iter().zip(&b.u_hat.coeffs).map(|(x, y)| x - y).collect();
    SpectralField::new(a.grid(), coeffs).unwrap().sobolev_norm(1.0)
}

fn run_to(state: &SimState, nl: Nonlinearity, dt: f64, steps: usize) -> SimState {
    let mut s = Stepper::new(state.grid(), nl, dt).unwrap();
    let mut c = state.u_hat.coeffs.clone();
    for _ in 0..steps {
        s.advance(&mut c);
    }
    SimState { t: state.t + dt * steps as f64, u_hat: SpectralField::new(state.grid(), c).unwrap() }
}

#[test]
fn reconstruction_round_trip() {
    let g = grid(Dimension::Four, 30.0, 128);
    let u0 = bump(&g, 0.7, 2.0);
    let u1 = RadialField::from_fn(&g, |r| r * (-r * r / 3.0).exp()).unwrap();
    let s = SimState::from_data(&u0, &u1).unwrap();
    assert!(max_diff(&s.u(), &u0) < 1e-12);
    assert!(max_diff(&s.ut(), &u1) < 1e-12);
}

#[test]
fn linear_step_is_the_half_wave() {
    let g = grid(Dimension::Four, 30.0, 128);
    let u0 = bump(&g, 1.0, 2.0);
    let s = SimState::from_data(&u0, &RadialField::zeros(&g)).unwrap();
    let next = step(&s, 0.05, Nonlinearity::Free).unwrap();
    let want = half_wave(&s.field(), 0.05);
    assert!(max_diff(&next.field(), &want) < 1e-12);
    let far = run_to(&s, Nonlinearity::Free, 0.05, 200);
    let h0 = s.u_hat.sobolev_norm(1.0);
    assert!((far.u_hat.sobolev_norm(1.0) - h0).abs() < 1e-10 * h0);
}

#[test]
fn zero_data_stays_zero() {
    let g = grid(Dimension::Four, 20.0, 64);
    let z = RadialField::zeros(&g);
    let rec = evolve(&z, &z, Nonlinearity::Quadratic, 0.5, 0.01, &Trackers::default()).unwrap();
    assert!(rec.samples.iter().all(|s| s.energy == 0.0 && s.h1 == 0.0));
    assert!(rec.final_state.u_hat.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0)));
    assert_eq!(rec.verdict, RunVerdict::Undetermined);
    let m = morawetz_track(&rec.trajectory, 5.0).unwrap();
    assert!(m.m.iter().all(|&v| v == 0.0));
    let l3 = l3_track(&rec.trajectory, 0.1).unwrap();
    assert!(l3.l3.iter().all(|&v| v == 0.0));
}

#[test]
fn fourth_order_self_convergence() {
    let g = grid(Dimension::Four, 30.0, 128);
    let s = SimState::from_data(&bump(&g, 1.5, 1.5), &RadialField::zeros(&g)).unwrap();
    let t = 1.0;
    let a = run_to(&s, Nonlinearity::Quadratic, t / 20.0, 20);
    let b = run_to(&s, Nonlinearity::Quadratic, t / 40.0, 40);
    let c = run_to(&s, Nonlinearity::Quadratic, t / 80.0, 80);
    let ratio = h1_diff(&a, &b) / h1_diff(&b, &c);
    assert!(ratio > 14.0 && ratio < 18.0, "Richardson ratio {ratio}");
}

#[test]
fn energy_is_conserved_on_small_data() {
    let g = grid(Dimension::Four, 40.0, 192);
    let tr = Trackers { stride: 50, ..Default::default() };
    let rec = evolve(&bump(&g, 0.5, 2.0), &RadialField::zeros(&g), Nonlinearity::Quadratic, 5.0, 0.005, &tr).unwrap();
    let e0 = rec.samples[0].energy;
    assert!(rec.max_energy_drift() / e0.abs() < 5e-7, "drift {}", rec.max_energy_drift() / e0);
    assert!(rec.samples.windows(2).all(|w| w[1].t > w[0].t));
}

#[test]
fn energy_is_conserved_in_3d() {
    let g = grid(Dimension::Three, 40.0, 192);
    let tr = Trackers { stride: 50, ..Default::default() };
    let rec = evolve(&bump(&g, 0.5, 2.0), &RadialField::zeros(&g), Nonlinearity::Quadratic, 3.0, 0.005, &tr).unwrap();
    assert!(rec.max_energy_drift() / rec.samples[0].energy.abs() < 1e-6);
}

#[test]
fn linear_run_does_not_blow_up_and_scatters_exactly() {
    let g = grid(Dimension::Four, 40.0, 128);
    let tr = Trackers { stride: 5, ..Default::default() };
    let rec = evolve(&bump(&g, 2.0, 2.0), &RadialField::zeros(&g), Nonlinearity::Free, 4.0, 0.01, &tr).unwrap();
    let b = detect_blowup(&rec.trajectory).unwrap();
    assert!(!b.blew_up && b.t_detect.is_none());
    let sc = scattering_extract(&rec.trajectory, &[2.0, 3.0, 4.0], &AnalysisParams::default(), 1e-3).unwrap();
    assert!(sc.cauchy.iter().flatten().all(|&d| d < 1e-10));
    assert!(sc.omega_h1.iter().all(|&v| v > 0.0));
    // identical profiles do not decrease strictly
    assert!(sc.consecutive.iter().all(|&d| d < 1e-10));
}

#[test]
fn scattering_needs_three_tail_samples() {
    let g = grid(Dimension::Four, 20.0, 64);
    let tr = Trackers { stride: 5, ..Default::default() };
    let rec = evolve(&bump(&g, 1.0, 2.0), &RadialField::zeros(&g), Nonlinearity::Free, 1.0, 0.01, &tr).unwrap();
    let p = AnalysisParams::default();
    assert!(matches!(scattering_extract(&rec.trajectory, &[0.5, 1.0], &p, 1e-3), Err(Error::Parameter(_))));
    assert!(matches!(scattering_extract(&rec.trajectory, &[0.1, 0.6, 1.0], &p, 1e-3), Err(Error::Parameter(_))));
}

#[test]
fn free_l3_norm_decays() {
    let g = grid(Dimension::Four, 60.0, 256);
    let tr = Trackers { stride: 10, ..Default::default() };
    let rec = evolve(&bump(&g, 1.0, 1.5), &RadialField::zeros(&g), Nonlinearity::Free, 20.0, 0.02, &tr).unwrap();
    let l3 = l3_track(&rec.trajectory, 2.0).unwrap();
    let at = |t: f64| l3.l3[l3.t.iter().position(|&s| (s - t).abs() < 1e-9).unwrap()];
    assert!(at(10.0) > at(15.0) && at(15.0) > at(20.0));
    let (t1, sup) = l3.best_window.unwrap();
    assert!(t1 > 15.0 && sup <= at(18.0) + 1e-12);
    assert_eq!(l3.first_window_below(0.0), None);
}

#[test]
fn ground_state_above_threshold_blows_up() {
    let g = grid(Dimension::Four, 40.0, 256);
    let q = solve_ground_state(&g, 1, 1e-6).unwrap();
    let u0 = q.profile.scale(1.5);
    let rec = evolve(&u0, &RadialField::zeros(&g), Nonlinearity::Quadratic, 5.0, 1e-3, &Trackers::default()).unwrap();
    assert_eq!(rec.verdict, RunVerdict::BlewUp);
    let t = rec.blowup_time.unwrap();
    assert!(t > 0.5 && t < 3.0, "blow-up at {t}");
    let b = detect_blowup(&rec.trajectory).unwrap();
    assert!(b.blew_up);
    assert!(b.resolved_points > 50);
    assert!(b.max_resolved_residual < 1e-3, "convexity residual {}", b.max_resolved_residual);
}

#[test]
fn morawetz_identity_on_a_short_run() {
    let g = grid(Dimension::Four, 40.0, 256);
    let q = solve_ground_state(&g, 1, 1e-6).unwrap();
    let tr = Trackers { morawetz_radius: Some(5.0), ..Default::default() };
    let rec = evolve(&q.profile.scale(0.8), &RadialField::zeros(&g), Nonlinearity::Quadratic, 2.0, 1e-3, &tr).unwrap();
    let m = morawetz_track(&rec.trajectory, 5.0).unwrap();
    assert!(m.max_residual < 1e-3, "residual {}", m.max_residual);
    assert!(m.m_constant.is_finite());
    for (s, v) in rec.samples.iter().zip(&m.m) {
        assert!((s.morawetz.unwrap() - v).abs() < 1e-12 * (1.0 + v.abs()));
    }
    assert!(matches!(morawetz_track(&rec.trajectory, 25.0), Err(Error::Parameter(_))));
}

#[test]
fn morawetz_requires_four_dimensions() {
    let g = grid(Dimension::Three, 20.0, 64);
    let z = RadialField::zeros(&g);
    let tr = Trackers { stride: 1, ..Default::default() };
    let rec = evolve(&z, &z, Nonlinearity::Quadratic, 0.1, 0.01, &tr).unwrap();
    assert!(matches!(morawetz_track(&rec.trajectory, 2.0), Err(Error::Parameter(_))));
}

#[test]
fn morawetz_weight_profiles() {
    let w = MorawetzWeights::new(Dimension::Four, 3.0, 20.0).unwrap();
    for i in 1..400 {
        let r = i as f64 * 0.05;
        let (p, p1, _, _) = w.phi_derivs(r);
        let (c, _, _) = w.chi_r(r);
        assert!((p1 - c * c).abs() < 1e-15);
        let gap = p / r - p1;
        if r <= 3.0 {
            assert!(gap.abs() < 1e-15);
            assert!((w.div_psi(r) - 4.0).abs() < 1e-14 && w.lap_div_psi(r) == 0.0);
        } else {
            // φ ≤ 2R, so the gap is at most 2R/r; beyond 2R it equals φ(2R)/r
            assert!(gap >= -1e-14 && gap <= 6.0 / r + 1e-14);
            if r >= 6.0 {
                assert!((gap - w.phi(6.0) / r).abs() < 1e-14);
            }
        }
        // φ' by central differences of φ
        let h = 1e-5;
        let fd = (w.phi(r + h) - w.phi(r - h)) / (2.0 * h);
        assert!((fd - p1).abs() < 1e-8, "r = {r}: {fd} vs {p1}");
    }
    assert!((w.phi(10.0) - w.phi(6.5)).abs() < 1e-15);
    assert!(MorawetzWeights::new(Dimension::Four, 11.0, 20.0).is_err());
    assert!(MorawetzWeights::new(Dimension::Four, 0.0, 20.0).is_err());
}

#[test]
fn boundary_contamination_stops_the_run() {
    let g = grid(Dimension::Four, 12.0, 64);
    let rec =
        evolve(&bump(&g, 1.0, 1.0), &RadialField::zeros(&g), Nonlinearity::Free, 20.0, 0.01, &Trackers::default())
            .unwrap();
    let t = rec.boundary_abort.expect("the wave must reach the edge");
    assert!(t < 20.0 && rec.verdict == RunVerdict::Undetermined);
}

#[test]
fn evolve_rejects_bad_parameters() {
    let g = grid(Dimension::Four, 20.0, 64);
    let z = RadialField::zeros(&g);
    let nl = Nonlinearity::Quadratic;
    assert!(matches!(evolve(&z, &z, nl, 1.0, 0.0, &Trackers::default()), Err(Error::Parameter(_))));
    assert!(matches!(evolve(&z, &z, nl, -1.0, 0.1, &Trackers::default()), Err(Error::Parameter(_))));
    let tr = Trackers { stride: 0, ..Default::default() };
    assert!(matches!(evolve(&z, &z, nl, 1.0, 0.1, &tr), Err(Error::Parameter(_))));
    let tr = Trackers { morawetz_radius: Some(15.0), ..Default::default() };
    assert!(matches!(evolve(&z, &z, nl, 1.0, 0.1, &tr), Err(Error::Parameter(_))));
    let other = grid(Dimension::Four, 20.0, 96);
    assert!(SimState::from_data(&z, &RadialField::zeros(&other)).is_err());
}

#[test]
fn normal_form_residual_of_trivial_runs() {
    let g = grid(Dimension::Four, 30.0, 96);
    let z = RadialField::zeros(&g);
    let tr = Trackers { stride: 10, ..Default::default() };
    let p = AnalysisParams::with_beta(10).unwrap();
    let rec = evolve(&z, &z, Nonlinearity::Quadratic, 0.1, 1e-3, &tr).unwrap();
    assert!(normal_form_residual(&rec.trajectory, &p).unwrap().iter().all(|&r| r == 0.0));
    let rec = evolve(&bump(&g, 1.0, 2.0), &z, Nonlinearity::Free, 0.1, 1e-3, &tr).unwrap();
    let r = normal_form_residual(&rec.trajectory, &p).unwrap();
    assert!(r.iter().all(|&v| v < 1e-6), "{r:?}");
}

#[test]
fn energy_of_initial_sample_matches_functional() {
    let g = grid(Dimension::Four, 20.0, 64);
    let u0 = bump(&g, 0.4, 1.5);
    let u1 = bump(&g, 0.2, 2.0);
    let rec = evolve(&u0, &u1, Nonlinearity::Quadratic, 0.05, 0.01, &Trackers::default()).unwrap();
    let e = energy(&u0, &u1, Nonlinearity::Quadratic).unwrap();
    assert!((rec.samples[0].energy - e).abs() < 1e-12 * e.abs());
    let traj: &Trajectory = &rec.trajectory;
    // 5 steps at stride 10: only the initial state lies on the stored grid
    assert_eq!(traj.states.len(), 1);
}
