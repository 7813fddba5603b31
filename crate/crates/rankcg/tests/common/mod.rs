//! Shared test support: an independent vertex-enumeration LP oracle and a
//! feasible-bounded random LP generator. The oracle deliberately shares no
//! code with the solver under test (its own Gaussian elimination, brute
//! force over active sets).

use rand::Rng;
use rankcg::linalg::Matrix;
use rankcg::lp::{Bounds, LinearProgram, RowSense};

/// Plain Gaussian elimination with partial pivoting; `None` when singular.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for (row, coeffs) in a.iter().enumerate() {
        assert_eq!(coeffs.len(), n, "square system, row {row}");
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            if f != 0.0 {
                for j in col..n {
                    a[i][j] -= f * a[col][j];
                }
                b[i] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in i + 1..n {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Some(x)
}

/// Optimal objective of a minimization LP by enumerating every basic point:
/// all size-`n_vars` subsets of {rows as equalities, finite bounds as
/// equalities}, solved and feasibility-checked. Only sensible for tiny
/// instances; returns `None` when no basic feasible point exists.
pub fn vertex_enumeration_optimum(lp: &LinearProgram<f64>) -> Option<f64> {
    let n = lp.n_vars();
    // candidate active constraints as (coefficients, rhs)
    let mut active: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..lp.n_rows() {
        active.push((lp.a.row(i).to_vec(), lp.rhs[i]));
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        for bound in [b.lower, b.upper] {
            if bound.is_finite() {
                let mut row = vec![0.0; n];
                row[j] = 1.0;
                active.push((row, bound));
            }
        }
    }

    let feasible = |x: &[f64]| -> bool {
        let tol = 1e-7;
        for i in 0..lp.n_rows() {
            let activity: f64 = lp.a.row(i).iter().zip(x).map(|(a, v)| a * v).sum();
            let ok = match lp.senses[i] {
                RowSense::Ge => activity >= lp.rhs[i] - tol,
                RowSense::Le => activity <= lp.rhs[i] + tol,
                RowSense::Eq => (activity - lp.rhs[i]).abs() <= tol,
            };
            if !ok {
                return false;
            }
        }
        lp.bounds
            .iter()
            .zip(x)
            .all(|(b, &v)| v >= b.lower - tol && v <= b.upper + tol)
    };

    let mut best: Option<f64> = None;
    let m = active.len();
    let mut pick: Vec<usize> = (0..n).collect();
    if m < n {
        return None;
    }
    loop {
        let a: Vec<Vec<f64>> = pick.iter().map(|&i| active[i].0.clone()).collect();
        let b: Vec<f64> = pick.iter().map(|&i| active[i].1).collect();
        if let Some(x) = gauss_solve(a, b) {
            if feasible(&x) {
                let obj: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(obj, |cur: f64| cur.min(obj)));
            }
        }
        // next combination in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] != i + m - n {
                break;
            }
        }
        if pick[i] == i + m - n {
            return best;
        }
        pick[i] += 1;
        for j in i + 1..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Random LP that is feasible and bounded by construction: a random interior
/// point `x0` inside a finite box, rows oriented to hold at `x0` with slack.
pub fn random_boxed_lp<R: Rng>(rng: &mut R, max_vars: usize, max_rows: usize) -> LinearProgram<f64> {
    let k = rng.random_range(1..=max_vars);
    let m = rng.random_range(1..=max_rows);
    let x0: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();

    let mut a = Matrix::zeros(m, k);
    let mut senses = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let row: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
        let activity: f64 = row.iter().zip(&x0).map(|(a, v)| a * v).sum();
        let slack: f64 = rng.random_range(0.0..2.0);
        if rng.random_bool(0.5) {
            senses.push(RowSense::Ge);
            rhs.push(activity - slack);
        } else {
            senses.push(RowSense::Le);
            rhs.push(activity + slack);
        }
        for (j, &v) in row.iter().enumerate() {
            a.set(i, j, v);
        }
    }
    let bounds = x0
        .iter()
        .map(|&v| Bounds::range(v - rng.random_range(0.5..3.0), v + rng.random_range(0.5..3.0)))
        .collect();
    let objective = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
    LinearProgram {
        objective,
        a,
        senses,
        rhs,
        bounds,
    }
}
