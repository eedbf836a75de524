//! Identities tying the solver, the orbit machinery and the oracles to
//! each other, plus randomized invariants.

mod common;

use proptest::prelude::*;

use scalefn_core::quad::adaptive_simpson;
use scalefn_core::{
    bv_embedding, companion_from_rational, downward_record_expectation,
    downward_record_from_plus, hitting_probability, laplace_exponent, orbit_evolve, phi_q,
    riccati_residual, scale_function, scale_integral, solve, solve_psi_bv, solve_psi_orbit,
    solve_psi_uv, standardize, uv_embedding, LevyModel, Matrix, RationalLst, Solution,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};

use common::{classic, erlang, hyperexp, oscillating};

/// The orbit Riccati fixed point specializes to the drift-and-jumps
/// iteration: same Psi row and same ladder generator.
#[test]
fn orbit_fixed_point_matches_the_bv_solver() {
    for (m, q) in [classic(), erlang()] {
        let om = bv_embedding(&m, q).unwrap();
        let orbit = solve_psi_orbit(&om, 1e-13, DEFAULT_MAX_ITER).unwrap();
        let sol = solve_psi_bv(&m, q, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(
            orbit.psi.sub(&sol.psi).max_abs() <= 1e-9,
            "Psi mismatch: {:?} vs {:?}",
            orbit.psi,
            sol.psi
        );
        let ladder = om.c_minus().add(&om.d_mp().matmul(&orbit.psi));
        assert!(ladder.sub(&sol.g).max_abs() <= 1e-9);
        assert!(riccati_residual(&om, &orbit.psi) <= 1e-10);
    }
}

#[test]
fn orbit_fixed_point_matches_the_uv_solver() {
    for (m, q) in [hyperexp(), oscillating()] {
        let om = uv_embedding(&m, q).unwrap();
        let orbit = solve_psi_orbit(&om, 1e-13, DEFAULT_MAX_ITER).unwrap();
        let sol = solve_psi_uv(&m, q, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(
            orbit.psi.sub(&sol.psi).max_abs() <= 1e-9,
            "Psi mismatch: {:?} vs {:?}",
            orbit.psi,
            sol.psi
        );
        let ladder = om.c_minus().add(&om.d_mp().matmul(&orbit.psi));
        assert!(ladder.sub(&sol.g).max_abs() <= 1e-9);
        assert!(riccati_residual(&om, &orbit.psi) <= 1e-10);
    }
}

/// Propagating the record expectation down to level -x and closing with
/// the hitting column reproduces the solver's hitting probability.
#[test]
fn record_propagation_reproduces_the_hitting_probability() {
    let (m, q) = erlang();
    let om = bv_embedding(&m, q).unwrap();
    let orbit = solve_psi_orbit(&om, 1e-13, DEFAULT_MAX_ITER).unwrap();
    let sol = solve(&m, q, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    let Solution::Bv(bv) = &sol else { panic!("erlang fixture is bounded variation") };
    for &x in &[0.5, 2.0] {
        let record = downward_record_from_plus(om.initial_plus(), &om, &orbit.psi, x).unwrap();
        let closed = record.matmul(&bv.nu).scalar();
        let direct = hitting_probability(&sol, x).unwrap();
        assert!((closed - direct).abs() <= 1e-9, "{closed} vs {direct} at x = {x}");
    }

    let (m, q) = hyperexp();
    let om = uv_embedding(&m, q).unwrap();
    let orbit = solve_psi_orbit(&om, 1e-13, DEFAULT_MAX_ITER).unwrap();
    let sol = solve(&m, q, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    let Solution::Uv(uv) = &sol else { panic!("hyperexp fixture has a Brownian part") };
    let mut start = Matrix::zeros(1, om.n_minus());
    start[(0, 0)] = 1.0;
    for &x in &[0.5, 2.0] {
        let record = downward_record_expectation(&start, &om, &orbit.psi, x).unwrap();
        let closed = record.matmul(&uv.v).scalar();
        let direct = hitting_probability(&sol, x).unwrap();
        assert!((closed - direct).abs() <= 1e-9, "{closed} vs {direct} at x = {x}");
    }
}

/// A heavy-tailed-drift model without killing makes the ladder generator
/// singular; the integral then comes from quadrature and must still match
/// integrating the scale function directly.
#[test]
fn singular_ladder_integral_agrees_with_direct_quadrature() {
    let lst = RationalLst::new(vec![0.5], vec![0.5]).unwrap();
    let jump = standardize(&companion_from_rational(&lst)).unwrap();
    let m = LevyModel::new(1.0, 0.0, 1.0, jump).unwrap();
    let root = phi_q(&m, 0.0).unwrap();
    // psi(theta) = theta^2/(theta + 1/2) here, so the largest root is 1/2.
    assert!((root.root - 0.5).abs() <= 1e-12);
    let sol = solve(&m, 0.0, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    let integral = scale_integral(&sol, &root, 3.0).unwrap();
    assert!(integral.used_quadrature);
    let mut f = |x: f64| scale_function(&sol, &root, x);
    let direct = adaptive_simpson(&mut f, 0.0, 3.0, 1e-11).unwrap();
    assert!(
        (integral.value - direct).abs() <= 1e-8 * direct,
        "{} vs {direct}",
        integral.value
    );
}

/// Subgenerator blocks with nonnegative starting rows: a random flow
/// stays a distribution and obeys the semigroup law.
fn subgenerator_and_row() -> impl Strategy<Value = (Matrix, Matrix)> {
    (1usize..=3).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0..1.5f64, n * n),
            prop::collection::vec(0.0..0.5f64, n),
            prop::collection::vec(0.01..1.0f64, n),
        )
            .prop_map(move |(off, kill, start)| {
                let mut c = Matrix::zeros(n, n);
                for i in 0..n {
                    let mut row_sum = 0.0;
                    for j in 0..n {
                        if i != j {
                            c[(i, j)] = off[i * n + j];
                            row_sum += off[i * n + j];
                        }
                    }
                    c[(i, i)] = -(row_sum + kill[i]);
                }
                let total: f64 = start.iter().sum();
                let normalized: Vec<f64> = start.iter().map(|v| v / total).collect();
                (c, Matrix::row(&normalized))
            })
    })
}

proptest! {
    #[test]
    fn orbit_flow_preserves_distributions((c, start) in subgenerator_and_row(),
                                          r in 0.01..2.0f64,
                                          s in 0.01..2.0f64) {
        let direct = orbit_evolve(&start, &c, r + s).unwrap();
        let sum: f64 = direct.data().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9, "normalization drifted to {sum}");
        prop_assert!(direct.data().iter().all(|&v| v >= -1e-12),
            "negative mass in {direct:?}");
        let chained = orbit_evolve(&orbit_evolve(&start, &c, r).unwrap(), &c, s).unwrap();
        prop_assert!(direct.sub(&chained).max_abs() <= 1e-9,
            "semigroup gap {:e}", direct.sub(&chained).max_abs());
    }

    #[test]
    fn random_drift_and_jump_models_solve_consistently(d in 0.5..3.0f64,
                                                       lambda in 0.2..2.0f64,
                                                       mu in 0.4..4.0f64,
                                                       q in 0.05..2.0f64) {
        let lst = RationalLst::new(vec![mu], vec![mu]).unwrap();
        let jump = standardize(&companion_from_rational(&lst)).unwrap();
        let m = LevyModel::new(d, 0.0, lambda, jump).unwrap();
        let root = phi_q(&m, q).unwrap();
        prop_assert!((laplace_exponent(&m, root.root).unwrap() - q).abs() <= 1e-10);
        let sol = solve_psi_bv(&m, q, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(sol.residual <= 1e-10);
        let wrapped = Solution::Bv(sol);
        let mut last = 0.0;
        for &x in &[0.0, 0.5, 1.0, 2.0, 4.0] {
            let w = scale_function(&wrapped, &root, x).unwrap();
            prop_assert!(w >= last - 1e-12, "W decreased: {w} after {last} at x = {x}");
            last = w;
            let hit = hitting_probability(&wrapped, x).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-9).contains(&hit), "hit = {hit}");
        }
        prop_assert!((scale_function(&wrapped, &root, 0.0).unwrap() - 1.0 / d).abs() <= 1e-8);
    }
}
