//! Solver integration tests: hand-checkable instances, randomized
//! comparisons against the vertex-enumeration oracle, certificate behavior,
//! and determinism.

mod common;

use common::{random_boxed_lp, vertex_enumeration_optimum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankcg::linalg::Matrix;
use rankcg::lp::{
    solve, verify_certificates, Bounds, LinearProgram, LpStatus, RowSense, SolverOptions,
    write_lp_text,
};

fn lp_1d(c: f64, sense: RowSense, rhs: f64, bounds: Bounds<f64>) -> LinearProgram<f64> {
    LinearProgram {
        objective: vec![c],
        a: Matrix::from_rows(&[vec![1.0]]),
        senses: vec![sense],
        rhs: vec![rhs],
        bounds: vec![bounds],
    }
}

#[test]
fn one_variable_lp() {
    // min x s.t. x >= 1
    let lp = lp_1d(1.0, RowSense::Ge, 1.0, Bounds::free());
    let sol = solve(&lp, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.x[0] - 1.0).abs() <= 1e-9);
    assert!((sol.objective - 1.0).abs() <= 1e-9);
    assert!((sol.y[0] - 1.0).abs() <= 1e-9, "row dual should be 1");
}

#[test]
fn unbounded_detected() {
    // min -x s.t. x >= 0, no upper bound
    let lp = lp_1d(-1.0, RowSense::Ge, 0.0, Bounds::non_negative());
    let sol = solve(&lp, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, LpStatus::Unbounded);
}

#[test]
fn infeasible_detected() {
    // x >= 1 with x <= -1 as a bound
    let lp = lp_1d(
        1.0,
        RowSense::Ge,
        1.0,
        Bounds::range(f64::NEG_INFINITY, -1.0),
    );
    let sol = solve(&lp, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, LpStatus::Infeasible);
}

#[test]
fn hand_lp_with_known_unique_optimum() {
    // min x + y s.t. x >= 1, y >= 2: optimum (1, 2), certificates exact
    let mut a = Matrix::zeros(2, 2);
    a.set(0, 0, 1.0);
    a.set(1, 1, 1.0);
    let lp: LinearProgram<f64> = LinearProgram {
        objective: vec![1.0, 1.0],
        a,
        senses: vec![RowSense::Ge, RowSense::Ge],
        rhs: vec![1.0, 2.0],
        bounds: vec![Bounds::free(), Bounds::free()],
    };
    let sol = solve(&lp, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.objective - 3.0).abs() <= 1e-12);
    let report = verify_certificates(&lp, &sol).unwrap();
    assert_eq!(report.duality_gap, 0.0);
    assert_eq!(report.complementary_slackness, 0.0);
    assert_eq!(report.max_primal_violation, 0.0);
    assert_eq!(report.max_dual_violation, 0.0);
}

#[test]
fn random_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut solved = 0;
    while solved < 20 {
        let lp = random_boxed_lp(&mut rng, 4, 5);
        let oracle = vertex_enumeration_optimum(&lp).expect("feasible by construction");
        let sol = solve(&lp, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal, "boxed LP must solve");
        assert!(
            (sol.objective - oracle).abs() <= 1e-8 * (1.0 + oracle.abs()),
            "simplex {} vs oracle {}",
            sol.objective,
            oracle
        );
        solved += 1;
    }
}

#[test]
fn certificates_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..30 {
        let lp = random_boxed_lp(&mut rng, 12, 10);
        let sol = solve(&lp, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        let report = verify_certificates(&lp, &sol).unwrap();
        assert!(report.within(1e-7, 1e-7, 1e-7, 1e-7), "{report:?}");
    }
}

#[test]
fn perturbed_solution_is_flagged() {
    let lp = lp_1d(1.0, RowSense::Ge, 1.0, Bounds::free());
    let mut sol = solve(&lp, &SolverOptions::default()).unwrap();
    sol.x[0] -= 0.1;
    let report = verify_certificates(&lp, &sol).unwrap();
    assert!(report.max_primal_violation >= 0.1 - 1e-12);
}

#[test]
fn resolving_is_bit_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    for _ in 0..5 {
        let lp = random_boxed_lp(&mut rng, 8, 8);
        let a = solve(&lp, &SolverOptions::default()).unwrap();
        let b = solve(&lp, &SolverOptions::default()).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.y, b.y);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.iterations, b.iterations);
    }
}

#[test]
fn equality_rows_handled() {
    // min x + y s.t. x + y = 2, x - y >= 0, x, y >= 0: optimum value 2
    let lp: LinearProgram<f64> = LinearProgram {
        objective: vec![1.0, 1.0],
        a: Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]),
        senses: vec![RowSense::Eq, RowSense::Ge],
        rhs: vec![2.0, 0.0],
        bounds: vec![Bounds::non_negative(), Bounds::non_negative()],
    };
    let sol = solve(&lp, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.objective - 2.0).abs() <= 1e-9);
}

#[test]
fn free_variables_solve_without_bounding() {
    // min |x - 5| encoded as min s, s >= x - 5, s >= 5 - x with x free:
    // optimum 0 at x = 5, reached without any artificial box on x
    let lp: LinearProgram<f64> = LinearProgram {
        objective: vec![0.0, 1.0],
        a: Matrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, 1.0]]),
        senses: vec![RowSense::Ge, RowSense::Ge],
        rhs: vec![-5.0, 5.0],
        bounds: vec![Bounds::free(), Bounds::free()],
    };
    let sol = solve(&lp, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!(sol.objective.abs() <= 1e-9);
    assert!((sol.x[0] - 5.0).abs() <= 1e-9);
}

#[test]
fn lp_text_export_has_fixed_layout() {
    let lp = LinearProgram {
        objective: vec![1.0, 0.0],
        a: Matrix::from_rows(&[vec![1.0, -2.0]]),
        senses: vec![RowSense::Ge],
        rhs: vec![1.0],
        bounds: vec![Bounds::range(-1.0, 1.0), Bounds::free()],
    };
    let mut buf = Vec::new();
    write_lp_text(&lp, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("Minimize\n"));
    assert!(text.contains("Subject To"));
    assert!(text.contains(">="));
    assert!(text.contains("x1 free"));
    assert!(text.trim_end().ends_with("End"));
}

#[test]
fn tiny_iteration_cap_reports_limit_not_wrong_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let lp = random_boxed_lp(&mut rng, 10, 8);
    let opts = SolverOptions {
        max_iters: Some(1),
        ..SolverOptions::default()
    };
    let sol = solve(&lp, &opts).unwrap();
    if sol.status == LpStatus::Optimal {
        // one pivot may genuinely suffice; the claim must then verify
        let report = verify_certificates(&lp, &sol).unwrap();
        assert!(report.within(1e-7, 1e-7, 1e-7, 1e-7));
    } else {
        assert_eq!(sol.status, LpStatus::IterationLimit);
        assert!(sol.diagnostics.is_some());
    }
}

#[test]
fn dimension_inconsistency_is_an_error() {
    let lp = LinearProgram {
        objective: vec![1.0, 2.0], // two costs, one column
        a: Matrix::from_rows(&[vec![1.0]]),
        senses: vec![RowSense::Ge],
        rhs: vec![1.0],
        bounds: vec![Bounds::free()],
    };
    assert!(solve(&lp, &SolverOptions::default()).is_err());
}
