use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zermelo::geometry::{fubini_study_angle, path_journey_time};
use zermelo::horizontality::is_horizontal;
use zermelo::instances::{head_on_wind, orthogonal_zero_wind, random_instance, tailwind};
use zermelo::linalg::{expm_unitary, hs_inner, projective_fidelity, HermitianOperator};
use zermelo::propagator::{derivative_residual, propagate_ordered, ConstantControl};
use zermelo::sampling::{random_hermitian, random_state};
use zermelo::solver::{find_journey_time, solve, NavigationProblem, NavigationSolution};

fn max_deviation(sol: &NavigationSolution, dt: f64) -> f64 {
    let traj = sol.propagate_ordered(dt).unwrap();
    traj.times()
        .iter()
        .zip(traj.states())
        .map(|(&t, s)| s.distance(&sol.propagate_closed_form(t)))
        .fold(0.0, f64::max)
}

#[test]
fn ordered_product_converges_to_closed_form() {
    let sol = solve(&head_on_wind(0.5)).unwrap();
    let coarse = max_deviation(&sol, 1e-3);
    let fine = max_deviation(&sol, 5e-4);
    assert!(coarse < 1e-5, "{coarse}");
    assert!(coarse / fine > 3.5, "{}", coarse / fine);
}

#[test]
fn ordered_product_reaches_the_target() {
    let p = random_instance(4, 3, 2.0);
    let sol = solve(&p).unwrap();
    let traj = sol.propagate_ordered(1e-3).unwrap();
    assert!((traj.times().last().unwrap() - sol.t_star).abs() < 1e-12);
    let f = projective_fidelity(traj.final_state().unwrap(), p.psi_f()).unwrap();
    assert!(f > 1.0 - 1e-9, "{f}");
}

#[test]
fn derivative_identity() {
    let sol = solve(&orthogonal_zero_wind()).unwrap();
    assert!(derivative_residual(&sol, 1.0, 1e-4) < 1e-7);

    let sol = solve(&head_on_wind(0.7)).unwrap();
    let t = 0.5 * sol.t_star;
    let r1 = derivative_residual(&sol, t, 1e-4);
    let r2 = derivative_residual(&sol, t, 5e-5);
    assert!(r1 < 1e-6);
    assert!(r1 / r2 > 3.5 && r1 / r2 < 4.5, "{}", r1 / r2);
}

#[test]
fn journey_time_integral_along_the_optimum() {
    // F = 1 along the optimal path, so the integral of F equals T.
    for p in [tailwind(0.3), head_on_wind(0.2), random_instance(9, 4, 1.5)] {
        let sol = solve(&p).unwrap();
        let traj = sol.trajectory(1e-3).unwrap();
        let total = path_journey_time(&traj, p.h0()).unwrap();
        assert!((total - sol.t_star).abs() < 1e-9, "{total} vs {}", sol.t_star);
    }
}

#[test]
fn competitor_paths_take_at_least_their_elapsed_time() {
    // For a unit-norm control, F ≤ 1 whenever the control is not horizontal
    // and F = 1 when it is; the integral is bounded by elapsed time.
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let p = random_instance(5, 3, 1.0);
    let k = random_hermitian(&mut rng, 3, 1.0).traceless_part();
    let k = k.scale((2.0 * hs_inner(&k, &k).unwrap()).sqrt().recip());
    let traj = propagate_ordered(p.h0(), ConstantControl(k), p.psi_i().clone(), 1.0, 1e-3).unwrap();
    let total = path_journey_time(&traj, p.h0()).unwrap();
    assert!(total <= 1.0 + 1e-9, "{total}");
}

#[test]
fn head_on_branches_point_opposite_ways() {
    let weak = solve(&head_on_wind(0.1)).unwrap();
    let strong = solve(&head_on_wind(1.0)).unwrap();
    let p = head_on_wind(0.0);
    let step = |sol: &NavigationSolution| expm_unitary(&sol.h1_initial, 0.05).apply(p.psi_i());
    let moved_weak = step(&weak);
    let moved_strong = step(&strong);
    // Both leave ψ_I at unit speed but in different directions.
    let a = fubini_study_angle(p.psi_i(), &moved_weak).unwrap();
    let b = fubini_study_angle(p.psi_i(), &moved_strong).unwrap();
    assert!((a - 0.05).abs() < 1e-12 && (b - 0.05).abs() < 1e-12);
    assert!(fubini_study_angle(&moved_weak, &moved_strong).unwrap() > 0.09);
}

#[test]
fn ties_are_reported_through_the_scan_minimum() {
    // A dense scan must not disagree with the default scan on the root.
    for seed in 0..20 {
        let p = random_instance(seed, 3, 2.0);
        let coarse = find_journey_time(&p).unwrap();
        let dense = find_journey_time(&p.clone().with_scan_step(1e-4).unwrap()).unwrap();
        assert!((coarse.t_star - dense.t_star).abs() < 1e-10, "seed {seed}");
        assert!(coarse.scan_min_before_root > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solution_invariants(seed in any::<u64>(), dim in 2usize..6, wind in 0.0..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = NavigationProblem::new(
            random_hermitian(&mut rng, dim, wind.max(1e-3)),
            random_state(&mut rng, dim),
            random_state(&mut rng, dim),
        ).unwrap();
        let sol = solve(&p).unwrap();
        prop_assert!(sol.diagnostics.passed(), "{:?}", sol.diagnostics.failures());
        prop_assert!((sol.theta - sol.t_star).abs() <= 10.0 * p.root_tol());
        prop_assert!(is_horizontal(&sol.h1_initial, p.psi_i(), 1e-8).unwrap());
        prop_assert!(sol.t_star <= std::f64::consts::PI + 1e-12);
        // f > 0 on the scan grid before the root.
        let step = p.scan_step();
        let mut t = step;
        while t < sol.t_star - p.root_tol() {
            prop_assert!(p.mismatch(t) > 0.0);
            t += step;
        }
    }

    #[test]
    fn phase_of_the_target_is_irrelevant(seed in any::<u64>(), phase in 0.0..std::f64::consts::TAU) {
        let p = random_instance(seed, 3, 1.5);
        let q = NavigationProblem::new(p.h0().clone(), p.psi_i().clone(), p.psi_f().with_phase(phase)).unwrap();
        let a = solve(&p).unwrap();
        let b = solve(&q).unwrap();
        prop_assert!((a.t_star - b.t_star).abs() < 1e-12);
        prop_assert!(a.h1_initial.matrix().max_abs_diff(b.h1_initial.matrix()) < 1e-9);
    }

    #[test]
    fn stronger_tailwind_is_never_slower(e1 in 0.0..1.0f64, e2 in 0.0..1.0f64) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let t_lo = solve(&tailwind(lo)).unwrap().t_star;
        let t_hi = solve(&tailwind(hi)).unwrap().t_star;
        prop_assert!(t_hi <= t_lo + 1e-12);
    }

    #[test]
    fn wind_free_time_is_the_geodesic_distance(seed in any::<u64>(), dim in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(&mut rng, dim);
        let b = random_state(&mut rng, dim);
        let p = NavigationProblem::new(HermitianOperator::zeros(dim), a.clone(), b.clone()).unwrap();
        let t = solve(&p).unwrap().t_star;
        prop_assert!((t - fubini_study_angle(&a, &b).unwrap()).abs() < 1e-12);
    }
}
