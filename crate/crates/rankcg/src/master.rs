//! Master problems of the column-generation trainers: the bounded-weight
//! master, its unbounded variant, the smoothed master that penalizes weight
//! changes, and the two LP-based ranking baselines, all members of one
//! pairwise-hinge LP family.
//!
//! The primal of this family is
//!
//! ```text
//! min  xi_cost * sum xi_{p,n} + penalty_cost * sum s_t
//! s.t. sum_t w_t (||x_p - q_t|| - ||x_n - q_t||) + xi_{p,n} >= 1   all pairs
//!      s_t - w_t >= -center_t,  s_t + w_t >= center_t             penalized t
//!      xi >= 0, s >= 0, bounds on w
//! ```
//!
//! A primal instance has one soft-margin row per (positive, negative) pair,
//! so anything beyond toy sizes is solved through its dual, which has one
//! row per prototype plus one per penalized weight: the pair multipliers
//! `pi` become box-bounded dual variables and the weights come back as the
//! duals of the prototype rows. [`solve_master`] always takes that route and
//! verifies the recovered primal/dual pair against the primal structure
//! directly, without materializing the dense primal matrix.

use thiserror::Error;

use crate::data::Dataset;
use crate::linalg::{euclidean, Matrix};
use crate::lp::{
    solve, Bounds, CertificateReport, LinearProgram, LpError, LpStatus, RowSense, SolverOptions,
};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum MasterError {
    #[error("prototype set is empty")]
    EmptyPrototypes,
    #[error("w_old has {got} entries, expected {want}")]
    WrongWOldLength { got: usize, want: usize },
    #[error("dataset must contain both classes")]
    SingleClass,
    #[error("lp error: {0}")]
    Lp(#[from] LpError),
    #[error("master LP not optimal: {status:?} {diagnostics:?}")]
    NotOptimal {
        status: LpStatus,
        diagnostics: Option<String>,
    },
}

/// Distance columns of the prototypes: `col(t)[i] = ||x_i - q_t||` for every
/// training point `i`. Append-only; difference entries are recomputed from
/// the cached distances on demand instead of being stored.
#[derive(Debug, Clone)]
pub struct DistanceColumns<T> {
    cols: Vec<Vec<T>>,
    n_points: usize,
    /// Row-major pair list: positive-outer, negative-inner.
    pairs: Vec<(usize, usize)>,
}

impl<T: Real> DistanceColumns<T> {
    pub fn for_dataset(ds: &Dataset<T>) -> Result<Self, MasterError> {
        if ds.pos_idx().is_empty() || ds.neg_idx().is_empty() {
            return Err(MasterError::SingleClass);
        }
        let mut pairs = Vec::with_capacity(ds.pos_idx().len() * ds.neg_idx().len());
        for &p in ds.pos_idx() {
            for &n in ds.neg_idx() {
                pairs.push((p, n));
            }
        }
        Ok(Self {
            cols: Vec::new(),
            n_points: ds.len(),
            pairs,
        })
    }

    /// Restricts the pair list to a deterministic subsample. Memory guard for
    /// very large datasets only; never used by the acceptance runs.
    pub fn cap_pairs(&mut self, cap: usize, seed: u64) {
        if self.pairs.len() <= cap {
            return;
        }
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        self.pairs.shuffle(&mut rng);
        self.pairs.truncate(cap);
        self.pairs.sort_unstable();
    }

    /// Computes and caches the distance column of a new prototype.
    pub fn push_prototype(&mut self, ds: &Dataset<T>, q: &[T]) {
        debug_assert_eq!(ds.len(), self.n_points);
        let col = (0..ds.len()).map(|i| euclidean(ds.row(i), q)).collect();
        self.cols.push(col);
    }

    /// Directly pushes a raw distance column (tests and baselines).
    pub fn push_raw_column(&mut self, col: Vec<T>) {
        assert_eq!(col.len(), self.n_points);
        self.cols.push(col);
    }

    pub fn n_prototypes(&self) -> usize {
        self.cols.len()
    }

    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn col(&self, t: usize) -> &[T] {
        &self.cols[t]
    }

    /// `||x_p - q_t|| - ||x_n - q_t||` for pair index `k`.
    #[inline]
    pub fn delta(&self, t: usize, k: usize) -> T {
        let (p, n) = self.pairs[k];
        self.cols[t][p] - self.cols[t][n]
    }

    /// `sum_k |delta(t, k)|`, the smoothing-penalty threshold beyond which
    /// the old weight `t` cannot move.
    pub fn column_abs_delta_sum(&self, t: usize) -> T {
        (0..self.n_pairs()).map(|k| self.delta(t, k).abs()).sum()
    }
}

/// Which member of the pairwise-hinge LP family to build.
#[derive(Debug, Clone)]
pub enum MasterKind<T> {
    /// Weights boxed to [-1, 1], objective `sum xi`.
    Bounded,
    /// Free weights, objective `sum xi`.
    Unbounded,
    /// Free weights, objective `sum xi + c * sum |w_t - w_old_t|` over the
    /// previously present prototypes (the newest weight is unpenalized).
    Smooth { w_old: Vec<T>, c: T },
    /// Ranking baseline with an L1 weight penalty:
    /// `min sum |w_t| + c * sum xi`.
    L1 { c: T },
    /// Ranking baseline with a weight box of radius `c`: `min sum xi`,
    /// `|w_t| <= c`.
    BoxedWeights { c: T },
}

/// Internal normal form of the family.
struct Shape<T> {
    xi_cost: T,
    w_bounds: Bounds<T>,
    /// `(column, center)` of each penalized weight.
    penalties: Vec<(usize, T)>,
    penalty_cost: T,
}

impl<T: Real> MasterKind<T> {
    fn shape(&self, n_cols: usize) -> Result<Shape<T>, MasterError> {
        if n_cols == 0 {
            return Err(MasterError::EmptyPrototypes);
        }
        Ok(match self {
            MasterKind::Bounded => Shape {
                xi_cost: T::one(),
                w_bounds: Bounds::range(-T::one(), T::one()),
                penalties: Vec::new(),
                penalty_cost: T::zero(),
            },
            MasterKind::Unbounded => Shape {
                xi_cost: T::one(),
                w_bounds: Bounds::free(),
                penalties: Vec::new(),
                penalty_cost: T::zero(),
            },
            MasterKind::Smooth { w_old, c } => {
                if w_old.len() != n_cols - 1 {
                    return Err(MasterError::WrongWOldLength {
                        got: w_old.len(),
                        want: n_cols - 1,
                    });
                }
                Shape {
                    xi_cost: T::one(),
                    w_bounds: Bounds::free(),
                    penalties: w_old.iter().copied().enumerate().collect(),
                    penalty_cost: *c,
                }
            }
            MasterKind::L1 { c } => Shape {
                xi_cost: *c,
                w_bounds: Bounds::free(),
                penalties: (0..n_cols).map(|t| (t, T::zero())).collect(),
                penalty_cost: T::one(),
            },
            MasterKind::BoxedWeights { c } => Shape {
                xi_cost: T::one(),
                w_bounds: Bounds::range(-*c, *c),
                penalties: Vec::new(),
                penalty_cost: T::zero(),
            },
        })
    }
}

/// Dense primal LP of the family. Column order: `w`, then `xi` in pair
/// order, then `s` in penalty order; rows: pairs, then the `s - w` and
/// `s + w` rows interleaved per penalized weight. Intended for small
/// instances, LP export and cross-checks; `solve_master` never builds it.
pub fn build_master<T: Real>(
    cols: &DistanceColumns<T>,
    kind: &MasterKind<T>,
) -> Result<LinearProgram<T>, MasterError> {
    let nq = cols.n_prototypes();
    let shape = kind.shape(nq)?;
    let n_pairs = cols.n_pairs();
    let n_pen = shape.penalties.len();
    let n_vars = nq + n_pairs + n_pen;
    let n_rows = n_pairs + 2 * n_pen;

    let mut objective = vec![T::zero(); n_vars];
    for k in 0..n_pairs {
        objective[nq + k] = shape.xi_cost;
    }
    for j in 0..n_pen {
        objective[nq + n_pairs + j] = shape.penalty_cost;
    }

    let mut a = Matrix::zeros(n_rows, n_vars);
    let mut senses = Vec::with_capacity(n_rows);
    let mut rhs = Vec::with_capacity(n_rows);
    for k in 0..n_pairs {
        for t in 0..nq {
            a.set(k, t, cols.delta(t, k));
        }
        a.set(k, nq + k, T::one());
        senses.push(RowSense::Ge);
        rhs.push(T::one());
    }
    for (j, &(t, center)) in shape.penalties.iter().enumerate() {
        let r1 = n_pairs + 2 * j;
        let r2 = r1 + 1;
        // s_t - w_t >= -center
        a.set(r1, nq + n_pairs + j, T::one());
        a.set(r1, t, -T::one());
        senses.push(RowSense::Ge);
        rhs.push(-center);
        // s_t + w_t >= center
        a.set(r2, nq + n_pairs + j, T::one());
        a.set(r2, t, T::one());
        senses.push(RowSense::Ge);
        rhs.push(center);
    }

    let mut bounds = vec![shape.w_bounds; nq];
    bounds.extend(std::iter::repeat(Bounds::non_negative()).take(n_pairs + n_pen));

    Ok(LinearProgram {
        objective,
        a,
        senses,
        rhs,
        bounds,
    })
}

/// Bounded master: weights boxed to [-1, 1], objective `sum xi`.
pub fn build_bounded_master<T: Real>(
    cols: &DistanceColumns<T>,
) -> Result<LinearProgram<T>, MasterError> {
    build_master(cols, &MasterKind::Bounded)
}

/// Smoothed master: free weights with an L1 penalty `c` on the change of
/// every previously present weight. With a single prototype there are no
/// penalty variables at all.
pub fn build_smooth_master<T: Real>(
    cols: &DistanceColumns<T>,
    w_old: &[T],
    c: T,
) -> Result<LinearProgram<T>, MasterError> {
    build_master(
        cols,
        &MasterKind::Smooth {
            w_old: w_old.to_vec(),
            c,
        },
    )
}

/// Optimal master solution: primal weights and slacks together with the
/// pair duals `pi` and the penalty-row duals `alpha`, `beta`, plus the
/// certificate residuals of the recovered primal/dual pair.
#[derive(Debug, Clone)]
pub struct MasterSolution<T> {
    pub w: Vec<T>,
    pub xi_sum: T,
    pub penalty: T,
    pub objective: T,
    /// One multiplier per pair, in the row-major pair order of the columns.
    pub pi: Vec<T>,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub lp_report: CertificateReport<T>,
    pub iterations: usize,
}

/// Dual of the family, built directly (one row per prototype, one per
/// penalized weight; `pi` appears as box bounds, not rows). Returned in
/// minimization form together with the objective sign flip.
fn build_dual<T: Real>(
    cols: &DistanceColumns<T>,
    shape: &Shape<T>,
) -> (LinearProgram<T>, DualLayout) {
    let nq = cols.n_prototypes();
    let n_pairs = cols.n_pairs();
    let n_pen = shape.penalties.len();
    let boxed = shape.w_bounds.lower.is_finite();
    let n_box = if boxed { nq } else { 0 };
    let n_vars = n_pairs + 2 * n_pen + 2 * n_box;
    let n_rows = nq + n_pen;

    // variables: pi (pairs) | alpha, beta per penalty | zlo, zhi per boxed w
    let alpha0 = n_pairs;
    let beta0 = n_pairs + n_pen;
    let zlo0 = n_pairs + 2 * n_pen;
    let zhi0 = zlo0 + n_box;

    let mut a = Matrix::zeros(n_rows, n_vars);
    let mut senses = Vec::with_capacity(n_rows);
    let mut rhs = Vec::with_capacity(n_rows);

    // one equality row per prototype column t:
    //   sum_k delta(t, k) pi_k - alpha_t + beta_t + zlo_t - zhi_t = 0
    let mut penalty_of_col = vec![None; nq];
    for (j, &(t, _)) in shape.penalties.iter().enumerate() {
        penalty_of_col[t] = Some(j);
    }
    for t in 0..nq {
        for k in 0..n_pairs {
            a.set(t, k, cols.delta(t, k));
        }
        if let Some(j) = penalty_of_col[t] {
            a.set(t, alpha0 + j, -T::one());
            a.set(t, beta0 + j, T::one());
        }
        if boxed {
            a.set(t, zlo0 + t, T::one());
            a.set(t, zhi0 + t, -T::one());
        }
        senses.push(RowSense::Eq);
        rhs.push(T::zero());
    }
    // one row per penalized weight: alpha_j + beta_j <= penalty_cost
    for j in 0..n_pen {
        a.set(nq + j, alpha0 + j, T::one());
        a.set(nq + j, beta0 + j, T::one());
        senses.push(RowSense::Le);
        rhs.push(shape.penalty_cost);
    }

    // maximize  sum pi + sum_j center_j (beta_j - alpha_j)
    //         + w_lower * sum zlo - w_upper * sum zhi
    // handed to the minimizing solver with the sign flipped
    let mut objective = vec![T::zero(); n_vars];
    for k in 0..n_pairs {
        objective[k] = -T::one();
    }
    for (j, &(_, center)) in shape.penalties.iter().enumerate() {
        objective[alpha0 + j] = center;
        objective[beta0 + j] = -center;
    }
    if boxed {
        for t in 0..nq {
            objective[zlo0 + t] = -shape.w_bounds.lower;
            objective[zhi0 + t] = shape.w_bounds.upper;
        }
    }

    let mut bounds = vec![Bounds::range(T::zero(), shape.xi_cost); n_pairs];
    bounds.extend(std::iter::repeat(Bounds::non_negative()).take(2 * n_pen + 2 * n_box));

    (
        LinearProgram {
            objective,
            a,
            senses,
            rhs,
            bounds,
        },
        DualLayout { alpha0, beta0 },
    )
}

struct DualLayout {
    alpha0: usize,
    beta0: usize,
}

/// Certificate verification of a recovered master solution against the
/// primal structure, streamed over the pair rows (the dense primal matrix is
/// never formed). Measures the same four residuals as the generic LP
/// verifier.
fn verify_master<T: Real>(
    cols: &DistanceColumns<T>,
    shape: &Shape<T>,
    w: &[T],
    xi: &[T],
    s: &[T],
    pi: &[T],
    alpha: &[T],
    beta: &[T],
    dual_objective: T,
) -> CertificateReport<T> {
    let nq = cols.n_prototypes();
    let n_pairs = cols.n_pairs();

    let mut primal = T::zero();
    let mut dual = T::zero();
    let mut slackness = T::zero();

    // pair rows: feasibility, pi in [0, xi_cost], pi * slack, xi reduced cost
    let mut pi_delta = vec![T::zero(); nq]; // sum_k pi_k delta(t, k)
    for k in 0..n_pairs {
        let mut margin = T::zero();
        for t in 0..nq {
            let d = cols.delta(t, k);
            margin += w[t] * d;
            pi_delta[t] += pi[k] * d;
        }
        let slack = margin + xi[k] - T::one();
        primal = primal.max(-slack).max(-xi[k]);
        dual = dual.max(-pi[k]).max(pi[k] - shape.xi_cost);
        slackness = slackness.max((pi[k] * slack).abs());
        // xi reduced cost is xi_cost - pi_k; active bound of xi is 0
        slackness = slackness.max(((shape.xi_cost - pi[k]) * xi[k]).abs());
    }

    // prototype columns: dual feasibility of the w rows
    let mut penalty_of_col = vec![None; nq];
    for (j, &(t, _)) in shape.penalties.iter().enumerate() {
        penalty_of_col[t] = Some(j);
    }
    let boxed = shape.w_bounds.lower.is_finite();
    for t in 0..nq {
        let mut z = -pi_delta[t]; // reduced cost of w_t (zero objective)
        if let Some(j) = penalty_of_col[t] {
            z += alpha[j] - beta[j];
        }
        if boxed {
            primal = primal
                .max(shape.w_bounds.lower - w[t])
                .max(w[t] - shape.w_bounds.upper);
            // box duals absorb z; complementary slackness at the active bound
            let dist = (w[t] - shape.w_bounds.lower)
                .abs()
                .min((w[t] - shape.w_bounds.upper).abs());
            slackness = slackness.max((z * dist).abs());
        } else {
            dual = dual.max(z.abs());
        }
    }

    // penalty rows: feasibility of s, alpha/beta signs and slackness
    for (j, &(t, center)) in shape.penalties.iter().enumerate() {
        let r1 = s[j] - w[t] + center; // >= 0
        let r2 = s[j] + w[t] - center; // >= 0
        primal = primal.max(-r1).max(-r2).max(-s[j]);
        dual = dual.max(-alpha[j]).max(-beta[j]);
        dual = dual.max(alpha[j] + beta[j] - shape.penalty_cost);
        slackness = slackness.max((alpha[j] * r1).abs()).max((beta[j] * r2).abs());
        // s reduced cost: penalty_cost - alpha - beta; active bound 0
        slackness =
            slackness.max(((shape.penalty_cost - alpha[j] - beta[j]) * s[j]).abs());
    }

    let xi_total: T = xi.iter().copied().sum();
    let s_total: T = s.iter().copied().sum();
    let objective = shape.xi_cost * xi_total + shape.penalty_cost * s_total;
    let gap = (objective - dual_objective).abs() / (T::one() + objective.abs());

    CertificateReport {
        max_primal_violation: primal,
        max_dual_violation: dual,
        duality_gap: gap,
        complementary_slackness: slackness,
    }
}

/// Solves a master problem through its dual and returns the recovered
/// primal/dual pair with certificates. Deterministic: repeated calls yield
/// bit-identical solutions.
pub fn solve_master<T: Real>(
    cols: &DistanceColumns<T>,
    kind: &MasterKind<T>,
    opts: &SolverOptions,
) -> Result<MasterSolution<T>, MasterError> {
    let nq = cols.n_prototypes();
    let shape = kind.shape(nq)?;
    let (dual_lp, layout) = build_dual(cols, &shape);
    let sol = solve(&dual_lp, opts)?;
    if sol.status != LpStatus::Optimal {
        return Err(MasterError::NotOptimal {
            status: sol.status,
            diagnostics: sol.diagnostics,
        });
    }

    let n_pairs = cols.n_pairs();
    let n_pen = shape.penalties.len();
    let pi = sol.x[..n_pairs].to_vec();
    let alpha = sol.x[layout.alpha0..layout.alpha0 + n_pen].to_vec();
    let beta = sol.x[layout.beta0..layout.beta0 + n_pen].to_vec();

    // weights are the duals of the prototype rows (negated: the dual was
    // handed to the solver with its maximization objective sign-flipped)
    let w: Vec<T> = (0..nq).map(|t| -sol.y[t]).collect();

    // cheapest primal completion for these weights
    let mut xi = vec![T::zero(); n_pairs];
    for (k, xi_k) in xi.iter_mut().enumerate() {
        let mut margin = T::zero();
        for (t, &wt) in w.iter().enumerate() {
            margin += wt * cols.delta(t, k);
        }
        *xi_k = (T::one() - margin).max(T::zero());
    }
    let s: Vec<T> = shape
        .penalties
        .iter()
        .map(|&(t, center)| (w[t] - center).abs())
        .collect();

    let dual_objective = -sol.objective;
    let report = verify_master(cols, &shape, &w, &xi, &s, &pi, &alpha, &beta, dual_objective);

    let xi_sum: T = xi.iter().copied().sum();
    let penalty = shape.penalty_cost * s.iter().copied().sum();
    Ok(MasterSolution {
        w,
        xi_sum: shape.xi_cost * xi_sum,
        penalty,
        objective: shape.xi_cost * xi_sum + penalty,
        pi,
        alpha,
        beta,
        lp_report: report,
        iterations: sol.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Columns fabricated directly from distances: one positive (index 0)
    /// and `neg` negatives, or per the given label layout.
    fn columns_from_distances(dist: Vec<Vec<f64>>, labels: Vec<i8>) -> DistanceColumns<f64> {
        let n = labels.len();
        let pos: Vec<usize> = (0..n).filter(|&i| labels[i] == 1).collect();
        let neg: Vec<usize> = (0..n).filter(|&i| labels[i] == -1).collect();
        let mut pairs = Vec::new();
        for &p in &pos {
            for &nn in &neg {
                pairs.push((p, nn));
            }
        }
        let mut cols = DistanceColumns {
            cols: Vec::new(),
            n_points: n,
            pairs,
        };
        for c in dist {
            cols.push_raw_column(c);
        }
        cols
    }

    #[test]
    fn bounded_master_single_pair_positive_delta() {
        // one prototype, delta = 2 - 1 = 1: min xi s.t. w + xi >= 1, |w| <= 1
        let cols = columns_from_distances(vec![vec![2.0, 1.0]], vec![1, -1]);
        let lp = build_bounded_master(&cols).unwrap();
        let sol = solve(&lp, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective.abs() <= 1e-9);
    }

    #[test]
    fn bounded_master_single_pair_negative_delta() {
        // delta = -1: constraint -w + xi >= 1 admits w = -1, xi = 0
        let cols = columns_from_distances(vec![vec![1.0, 2.0]], vec![1, -1]);
        let lp = build_bounded_master(&cols).unwrap();
        let sol = solve(&lp, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective.abs() <= 1e-9);
    }

    #[test]
    fn bounded_master_conflicting_pairs() {
        // two pairs with deltas +1 and -1 on one prototype: every feasible w
        // pays max(0, 1-w) + max(0, 1+w) = 2 on [-1, 1], so the optimum is 2
        // (vertex enumeration: w = 1 gives (0, 2), w = -1 gives (2, 0))
        let cols = columns_from_distances(vec![vec![2.0, 1.0, 3.0]], vec![1, -1, -1]);
        assert_eq!(cols.delta(0, 0), 1.0);
        assert_eq!(cols.delta(0, 1), -1.0);
        let lp = build_bounded_master(&cols).unwrap();
        let sol = solve(&lp, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 2.0).abs() <= 1e-9);
    }

    #[test]
    fn smooth_master_without_history_has_no_penalty_vars() {
        let cols = columns_from_distances(vec![vec![3.0, 1.0]], vec![1, -1]);
        let lp = build_smooth_master(&cols, &[], 0.5).unwrap();
        // variables: one w, one xi; rows: one pair row
        assert_eq!(lp.n_vars(), 2);
        assert_eq!(lp.n_rows(), 1);
        let sol = solve(&lp, &SolverOptions::default()).unwrap();
        assert!(sol.objective.abs() <= 1e-9);
    }

    #[test]
    fn smooth_master_rejects_wrong_w_old_length() {
        let cols = columns_from_distances(vec![vec![3.0, 1.0]], vec![1, -1]);
        assert!(matches!(
            build_smooth_master(&cols, &[0.5], 0.5),
            Err(MasterError::WrongWOldLength { got: 1, want: 0 })
        ));
        assert!(matches!(
            solve_master(
                &cols,
                &MasterKind::Smooth {
                    w_old: vec![0.1],
                    c: 1.0
                },
                &SolverOptions::default()
            ),
            Err(MasterError::WrongWOldLength { .. })
        ));
    }

    #[test]
    fn solve_master_matches_direct_primal_solve() {
        // three prototypes over a 5-point instance, smooth penalty
        let cols = columns_from_distances(
            vec![
                vec![1.0, 2.0, 0.5, 1.5, 2.5],
                vec![0.3, 1.1, 2.2, 0.7, 1.9],
                vec![2.0, 0.1, 1.0, 1.0, 0.4],
            ],
            vec![1, 1, -1, -1, -1],
        );
        for kind in [
            MasterKind::Bounded,
            MasterKind::Unbounded,
            MasterKind::Smooth {
                w_old: vec![0.4, -0.2],
                c: 0.05,
            },
            MasterKind::L1 { c: 2.0 },
            MasterKind::BoxedWeights { c: 0.7 },
        ] {
            let primal = build_master(&cols, &kind).unwrap();
            let direct = solve(&primal, &SolverOptions::default()).unwrap();
            assert_eq!(direct.status, LpStatus::Optimal, "{kind:?}");
            let master = solve_master(&cols, &kind, &SolverOptions::default()).unwrap();
            assert!(
                (master.objective - direct.objective).abs() <= 1e-8 * (1.0 + direct.objective.abs()),
                "{kind:?}: dual-path {} vs direct {}",
                master.objective,
                direct.objective
            );
            assert!(master.lp_report.within(1e-7, 1e-7, 1e-7, 1e-7), "{kind:?}");
        }
    }

    #[test]
    fn dual_path_matches_direct_primal_on_random_instances() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for round in 0..10 {
            let n_pos = rng.random_range(2..=4);
            let n_neg = rng.random_range(2..=4);
            let nq = rng.random_range(1..=3);
            let n = n_pos + n_neg;
            let labels: Vec<i8> = (0..n).map(|i| if i < n_pos { 1 } else { -1 }).collect();
            let dist: Vec<Vec<f64>> = (0..nq)
                .map(|_| (0..n).map(|_| rng.random_range(0.0..3.0)).collect())
                .collect();
            let cols = columns_from_distances(dist, labels);
            let w_old: Vec<f64> = (0..nq - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
            let kinds = [
                MasterKind::Bounded,
                MasterKind::Unbounded,
                MasterKind::Smooth {
                    w_old,
                    c: rng.random_range(0.0..0.5),
                },
                MasterKind::L1 {
                    c: rng.random_range(0.1..5.0),
                },
                MasterKind::BoxedWeights {
                    c: rng.random_range(0.1..2.0),
                },
            ];
            for kind in kinds {
                let primal = build_master(&cols, &kind).unwrap();
                let direct = solve(&primal, &SolverOptions::default()).unwrap();
                assert_eq!(direct.status, LpStatus::Optimal, "round {round} {kind:?}");
                let via_dual = solve_master(&cols, &kind, &SolverOptions::default()).unwrap();
                assert!(
                    (via_dual.objective - direct.objective).abs()
                        <= 1e-8 * (1.0 + direct.objective.abs()),
                    "round {round} {kind:?}: {} vs {}",
                    via_dual.objective,
                    direct.objective
                );
                assert!(
                    via_dual.lp_report.within(1e-7, 1e-7, 1e-7, 1e-7),
                    "round {round} {kind:?}: {:?}",
                    via_dual.lp_report
                );
            }
        }
    }

    #[test]
    fn master_solution_invariants_hold() {
        let cols = columns_from_distances(
            vec![
                vec![1.0, 0.2, 0.5, 1.5],
                vec![0.6, 1.3, 0.1, 0.9],
            ],
            vec![1, -1, 1, -1],
        );
        let kind = MasterKind::Smooth {
            w_old: vec![0.3],
            c: 0.1,
        };
        let m = solve_master(&cols, &kind, &SolverOptions::default()).unwrap();
        for &p in &m.pi {
            assert!(p >= -1e-9 && p <= 1.0 + 1e-9);
        }
        for (&a, &b) in m.alpha.iter().zip(&m.beta) {
            assert!(a >= -1e-9 && b >= -1e-9);
            assert!(a + b <= 0.1 + 1e-9);
        }
        assert!((m.objective - (m.xi_sum + m.penalty)).abs() <= 1e-9);
        // dual feasibility at the existing columns, including the newest
        for t in 0..2 {
            let mut acc = 0.0;
            for k in 0..cols.n_pairs() {
                acc += m.pi[k] * cols.delta(t, k);
            }
            if t == 0 {
                acc -= m.alpha[0] - m.beta[0];
            }
            assert!(acc.abs() <= 1e-7, "column {t} residual {acc}");
        }
    }

    #[test]
    fn smooth_with_zero_c_matches_unbounded() {
        let cols = columns_from_distances(
            vec![
                vec![1.0, 2.0, 0.5, 1.5, 2.5, 0.2],
                vec![0.3, 1.1, 2.2, 0.7, 1.9, 1.4],
            ],
            vec![1, 1, 1, -1, -1, -1],
        );
        let smooth = solve_master(
            &cols,
            &MasterKind::Smooth {
                w_old: vec![0.7],
                c: 0.0,
            },
            &SolverOptions::default(),
        )
        .unwrap();
        let unbounded =
            solve_master(&cols, &MasterKind::Unbounded, &SolverOptions::default()).unwrap();
        assert!((smooth.objective - unbounded.objective).abs() <= 1e-8);
    }

    #[test]
    fn huge_c_freezes_old_weights() {
        let cols = columns_from_distances(
            vec![
                vec![1.0, 2.0, 0.5, 1.5, 2.5, 0.2],
                vec![0.3, 1.1, 2.2, 0.7, 1.9, 1.4],
                vec![2.0, 0.1, 1.0, 1.0, 0.4, 0.6],
            ],
            vec![1, 1, 1, -1, -1, -1],
        );
        let w_old = vec![0.37, -0.81];
        let bound = (0..2)
            .map(|t| cols.column_abs_delta_sum(t))
            .fold(0.0f64, f64::max);
        let m = solve_master(
            &cols,
            &MasterKind::Smooth {
                w_old: w_old.clone(),
                c: 2.0 * bound + 1.0,
            },
            &SolverOptions::default(),
        )
        .unwrap();
        for (wt, wo) in m.w.iter().zip(&w_old) {
            assert!((wt - wo).abs() <= 1e-6, "{wt} vs {wo}");
        }
    }

    #[test]
    fn adding_a_column_never_hurts_bounded_master() {
        let base = vec![
            vec![1.0, 2.0, 0.5, 1.5, 0.7],
            vec![0.3, 1.1, 2.2, 0.7, 1.2],
        ];
        let extra = vec![0.9, 0.4, 1.6, 0.2, 2.0];
        let labels = vec![1, 1, -1, -1, -1];
        let small = columns_from_distances(base.clone(), labels.clone());
        let mut big_cols = base;
        big_cols.push(extra);
        let big = columns_from_distances(big_cols, labels);
        let small_obj = solve_master(&small, &MasterKind::Bounded, &SolverOptions::default())
            .unwrap()
            .objective;
        let big_obj = solve_master(&big, &MasterKind::Bounded, &SolverOptions::default())
            .unwrap()
            .objective;
        assert!(big_obj <= small_obj + 1e-9);
    }

    #[test]
    fn solve_master_is_bit_identical_across_calls() {
        let cols = columns_from_distances(
            vec![
                vec![1.0, 2.0, 0.5, 1.5, 2.5],
                vec![0.3, 1.1, 2.2, 0.7, 1.9],
            ],
            vec![1, 1, -1, -1, -1],
        );
        let kind = MasterKind::Smooth {
            w_old: vec![0.2],
            c: 0.3,
        };
        let a = solve_master(&cols, &kind, &SolverOptions::default()).unwrap();
        let b = solve_master(&cols, &kind, &SolverOptions::default()).unwrap();
        assert_eq!(a.w, b.w);
        assert_eq!(a.pi, b.pi);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn pair_cap_subsamples_deterministically() {
        let labels = vec![1, 1, 1, -1, -1, -1];
        let dist = vec![vec![1.0, 2.0, 0.5, 1.5, 2.5, 0.2]];
        let mut a = columns_from_distances(dist.clone(), labels.clone());
        let mut b = columns_from_distances(dist, labels);
        assert_eq!(a.n_pairs(), 9);
        a.cap_pairs(4, 11);
        b.cap_pairs(4, 11);
        assert_eq!(a.n_pairs(), 4);
        assert_eq!(a.pairs(), b.pairs());
        // capping below the current count is a no-op
        a.cap_pairs(100, 3);
        assert_eq!(a.n_pairs(), 4);
    }

    #[test]
    fn empty_prototype_set_rejected() {
        let cols = columns_from_distances(vec![], vec![1, -1]);
        assert!(matches!(
            build_bounded_master(&cols),
            Err(MasterError::EmptyPrototypes)
        ));
    }
}
