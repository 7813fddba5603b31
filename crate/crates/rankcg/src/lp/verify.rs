//! Independent certificate verification: recomputes feasibility, duality gap
//! and complementary slackness from the raw problem data, never trusting the
//! solver's internal state.

use crate::linalg::dot;
use crate::scalar::Real;

use super::{LinearProgram, LpError, LpSolution, LpStatus, RowSense};

/// Residuals measuring the quality of a claimed optimal solution.
#[derive(Debug, Clone, Copy)]
pub struct CertificateReport<T> {
    pub max_primal_violation: T,
    pub max_dual_violation: T,
    /// Relative duality gap: `|c'x - dual objective| / (1 + |c'x|)`.
    pub duality_gap: T,
    /// Max over rows of `|y_i * slack_i|` and over variables of
    /// `|z_j * (x_j - nearest finite bound)|`.
    pub complementary_slackness: T,
}

impl<T: Real> CertificateReport<T> {
    pub fn within(&self, primal: T, dual: T, gap: T, slackness: T) -> bool {
        self.max_primal_violation <= primal
            && self.max_dual_violation <= dual
            && self.duality_gap <= gap
            && self.complementary_slackness <= slackness
    }
}

/// Verifies an `Optimal` solution against its LP.
pub fn verify_certificates<T: Real>(
    lp: &LinearProgram<T>,
    sol: &LpSolution<T>,
) -> Result<CertificateReport<T>, LpError> {
    lp.validate()?;
    if sol.status != LpStatus::Optimal {
        return Err(LpError::NotOptimal);
    }
    if sol.x.len() != lp.n_vars() || sol.y.len() != lp.n_rows() {
        return Err(LpError::Dimension(
            "solution vectors do not match problem shape".to_string(),
        ));
    }

    let mut primal = T::zero();
    let mut dual = T::zero();
    let mut slackness = T::zero();

    // row feasibility, row dual signs, row slackness
    for i in 0..lp.n_rows() {
        let activity = dot(lp.a.row(i), &sol.x);
        let diff = activity - lp.rhs[i];
        let (violation, dual_violation) = match lp.senses[i] {
            RowSense::Ge => ((-diff).max(T::zero()), (-sol.y[i]).max(T::zero())),
            RowSense::Le => (diff.max(T::zero()), sol.y[i].max(T::zero())),
            RowSense::Eq => (diff.abs(), T::zero()),
        };
        primal = primal.max(violation);
        dual = dual.max(dual_violation);
        slackness = slackness.max((sol.y[i] * diff).abs());
    }

    // bound feasibility, reduced-cost signs, variable slackness, and the
    // bound contributions of the dual objective
    let mut dual_objective = dot(&lp.rhs, &sol.y);
    for j in 0..lp.n_vars() {
        let xj = sol.x[j];
        let b = lp.bounds[j];
        primal = primal.max(b.lower - xj).max(xj - b.upper);

        let mut z = lp.objective[j];
        for i in 0..lp.n_rows() {
            z -= sol.y[i] * lp.a.get(i, j);
        }
        if z > T::zero() {
            if b.lower.is_finite() {
                dual_objective += z * b.lower;
            } else {
                dual = dual.max(z);
            }
        } else if z < T::zero() {
            if b.upper.is_finite() {
                dual_objective += z * b.upper;
            } else {
                dual = dual.max(-z);
            }
        }

        let dist_lower = if b.lower.is_finite() {
            (xj - b.lower).abs()
        } else {
            T::infinity()
        };
        let dist_upper = if b.upper.is_finite() {
            (xj - b.upper).abs()
        } else {
            T::infinity()
        };
        let dist = dist_lower.min(dist_upper);
        if dist.is_finite() {
            slackness = slackness.max((z * dist).abs());
        }
    }

    let objective = dot(&lp.objective, &sol.x);
    let gap = (objective - dual_objective).abs() / (T::one() + objective.abs());

    Ok(CertificateReport {
        max_primal_violation: primal,
        max_dual_violation: dual,
        duality_gap: gap,
        complementary_slackness: slackness,
    })
}
