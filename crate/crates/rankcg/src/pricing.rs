//! Column-generation pricing: search for a prototype point whose distance
//! column violates dual feasibility of the master.
//!
//! For the pair duals `pi` the violation of a candidate `q` is
//!
//! ```text
//! |f(q)|,   f(q) = sum_{p,n} pi_{p,n} (||x_p - q|| - ||x_n - q||)
//! ```
//!
//! which collapses to the single sum `f(q) = sum_i c_i ||x_i - q||` with one
//! net coefficient per training point. The search warm-starts at the best
//! training point and continues with Adam ascent on `|f|`.

use thiserror::Error;

use crate::data::Dataset;
use crate::linalg::{euclidean, Matrix};
use crate::master::DistanceColumns;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum PricingError {
    #[error("point dimension {got} does not match data dimension {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error("non-finite input")]
    NonFinite,
    #[error("pi has {got} entries for {want} pairs")]
    WrongPiLength { got: usize, want: usize },
}

/// Distance below which a `||x_i - q||` term sits on its kink and its
/// (sub)gradient contribution is dropped.
const KINK_RADIUS: f64 = 1e-12;

/// Aggregated pricing problem: per-point net dual coefficients over a copy
/// of the training features.
#[derive(Debug, Clone)]
pub struct PricingProblem<T> {
    coeffs: Vec<T>,
    points: Matrix<T>,
}

impl<T: Real> PricingProblem<T> {
    /// Reduces pair duals to per-point coefficients:
    /// `c_p = sum_n pi_{p,n}` and `c_n = -sum_p pi_{p,n}`.
    pub fn from_duals(
        train: &Dataset<T>,
        cols: &DistanceColumns<T>,
        pi: &[T],
    ) -> Result<Self, PricingError> {
        if pi.len() != cols.n_pairs() {
            return Err(PricingError::WrongPiLength {
                got: pi.len(),
                want: cols.n_pairs(),
            });
        }
        if pi.iter().any(|v| !v.is_finite()) {
            return Err(PricingError::NonFinite);
        }
        let mut coeffs = vec![T::zero(); train.len()];
        for (k, &(p, n)) in cols.pairs().iter().enumerate() {
            coeffs[p] += pi[k];
            coeffs[n] -= pi[k];
        }
        Ok(Self {
            coeffs,
            points: train.features().clone(),
        })
    }

    /// Direct construction from coefficients (tests).
    pub fn from_parts(coeffs: Vec<T>, points: Matrix<T>) -> Self {
        assert_eq!(coeffs.len(), points.rows());
        Self { coeffs, points }
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    fn check_point(&self, q: &[T]) -> Result<(), PricingError> {
        if q.len() != self.dim() {
            return Err(PricingError::DimensionMismatch {
                got: q.len(),
                want: self.dim(),
            });
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(PricingError::NonFinite);
        }
        Ok(())
    }

    /// Signed violation `f(q)`.
    pub fn signed_value(&self, q: &[T]) -> Result<T, PricingError> {
        self.check_point(q)?;
        let mut acc = T::zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != T::zero() {
                acc += c * euclidean(self.points.row(i), q);
            }
        }
        Ok(acc)
    }

    /// Violation magnitude `|f(q)|`, the pricing objective.
    pub fn objective(&self, q: &[T]) -> Result<T, PricingError> {
        Ok(self.signed_value(q)?.abs())
    }

    /// Gradient of `|f|` at `q`: `sign(f) * sum_i c_i (q - x_i)/||q - x_i||`,
    /// with terms closer than the kink radius dropped (the minimum-norm
    /// subgradient choice).
    pub fn gradient(&self, q: &[T]) -> Result<Vec<T>, PricingError> {
        self.check_point(q)?;
        let kink = T::real(KINK_RADIUS);
        let mut f = T::zero();
        let mut grad = vec![T::zero(); self.dim()];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == T::zero() {
                continue;
            }
            let x = self.points.row(i);
            let dist = euclidean(x, q);
            f += c * dist;
            if dist < kink {
                continue;
            }
            let scale = c / dist;
            for (g, (&qj, &xj)) in grad.iter_mut().zip(q.iter().zip(x)) {
                *g += scale * (qj - xj);
            }
        }
        let sign = if f > T::zero() {
            T::one()
        } else if f < T::zero() {
            -T::one()
        } else {
            T::zero()
        };
        for g in &mut grad {
            *g *= sign;
        }
        Ok(grad)
    }
}

/// Adam parameters and the stopping rule of the subproblem search.
#[derive(Debug, Clone)]
pub struct AdamConfig {
    pub step_size: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    /// Stop once the relative objective change drops below this.
    pub rel_obj_tol: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            step_size: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_iters: 1000,
            rel_obj_tol: 1e-5,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<(), PricingError> {
        let ok = self.step_size > 0.0
            && self.beta1 > 0.0
            && self.beta1 < 1.0
            && self.beta2 > 0.0
            && self.beta2 < 1.0
            && self.epsilon > 0.0
            && self.max_iters > 0
            && self.rel_obj_tol > 0.0
            && self.rel_obj_tol < 1.0;
        if ok {
            Ok(())
        } else {
            Err(PricingError::NonFinite)
        }
    }
}

/// Best candidate row by pricing objective; ties go to the lowest row index.
pub fn warm_start<T: Real>(
    pp: &PricingProblem<T>,
    candidates: &Matrix<T>,
) -> Result<(Vec<T>, T), PricingError> {
    if candidates.rows() == 0 {
        return Err(PricingError::EmptyCandidates);
    }
    let mut best_idx = 0;
    let mut best_val = T::neg_infinity();
    for (i, row) in candidates.iter_rows().enumerate() {
        let v = pp.objective(row)?;
        if v > best_val {
            best_val = v;
            best_idx = i;
        }
    }
    Ok((candidates.row(best_idx).to_vec(), best_val))
}

/// Result of a pricing search.
#[derive(Debug, Clone)]
pub struct PricingRun<T> {
    pub point: Vec<T>,
    pub value: T,
    pub iterations: usize,
}

/// Warm-started Adam ascent on `|f|`. Keeps the best iterate ever visited;
/// stops on the relative-objective rule or after `max_iters` steps. A zero
/// gradient at the warm start returns immediately.
pub fn solve_pricing<T: Real>(
    pp: &PricingProblem<T>,
    candidates: &Matrix<T>,
    cfg: &AdamConfig,
) -> Result<PricingRun<T>, PricingError> {
    cfg.validate()?;
    let (mut q, start_val) = warm_start(pp, candidates)?;
    let mut best_point = q.clone();
    let mut best_val = start_val;

    let g0 = pp.gradient(&q)?;
    if g0.iter().all(|g| *g == T::zero()) {
        return Ok(PricingRun {
            point: best_point,
            value: best_val,
            iterations: 0,
        });
    }

    let d = pp.dim();
    let step = T::real(cfg.step_size);
    let b1 = T::real(cfg.beta1);
    let b2 = T::real(cfg.beta2);
    let eps = T::real(cfg.epsilon);
    let tol = T::real(cfg.rel_obj_tol);
    let tiny = T::real(1e-300).max(T::min_positive_value());

    let mut m = vec![T::zero(); d];
    let mut v = vec![T::zero(); d];
    let mut prev = start_val;
    let mut iters = 0;
    let mut b1_pow = T::one();
    let mut b2_pow = T::one();
    for _ in 1..=cfg.max_iters {
        iters += 1;
        let g = pp.gradient(&q)?;
        b1_pow *= b1;
        b2_pow *= b2;
        for j in 0..d {
            m[j] = b1 * m[j] + (T::one() - b1) * g[j];
            v[j] = b2 * v[j] + (T::one() - b2) * g[j] * g[j];
            let m_hat = m[j] / (T::one() - b1_pow);
            let v_hat = v[j] / (T::one() - b2_pow);
            // ascent on |f|
            q[j] += step * m_hat / (v_hat.sqrt() + eps);
        }
        let val = pp.objective(&q)?;
        if val > best_val {
            best_val = val;
            best_point = q.clone();
        }
        let rel = (val - prev).abs() / prev.abs().max(tiny);
        prev = val;
        if rel < tol {
            break;
        }
    }

    Ok(PricingRun {
        point: best_point,
        value: best_val,
        iterations: iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// pi = 1 on the single pair x_p = (3,4), x_n = (0,1).
    fn single_pair() -> PricingProblem<f64> {
        let points = Matrix::from_rows(&[vec![3.0, 4.0], vec![0.0, 1.0]]);
        PricingProblem::from_parts(vec![1.0, -1.0], points)
    }

    #[test]
    fn objective_single_pair() {
        let pp = single_pair();
        // |5 - 1| at the origin
        assert!((pp.objective(&[0.0, 0.0]).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_duals_zero_objective() {
        let points = Matrix::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5]]);
        let pp = PricingProblem::from_parts(vec![0.0, 0.0], points);
        assert_eq!(pp.objective(&[0.3, -0.7]).unwrap(), 0.0);
        assert_eq!(pp.objective(&[5.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn gradient_single_pair_hand_value() {
        let pp = single_pair();
        let g = pp.gradient(&[0.0, 0.0]).unwrap();
        // f = 4 > 0: (q-x_p)/5 - (q-x_n)/1 = (-0.6, -0.8) - (0, -1)
        assert!((g[0] - -0.6).abs() < 1e-12);
        assert!((g[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn gradient_at_data_point_is_finite() {
        let pp = single_pair();
        let g = pp.gradient(&[3.0, 4.0]).unwrap();
        assert!(g.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let pp = single_pair();
        assert!(matches!(
            pp.objective(&[0.0]),
            Err(PricingError::DimensionMismatch { got: 1, want: 2 })
        ));
        assert!(pp.gradient(&[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn warm_start_tie_takes_lowest_index() {
        let pp = single_pair();
        let candidates = Matrix::from_rows(&[vec![3.0, 4.0], vec![0.0, 1.0]]);
        let (q, v) = warm_start(&pp, &candidates).unwrap();
        // both data points score sqrt(18); the tie goes to x_p
        assert_eq!(q, vec![3.0, 4.0]);
        assert!((v - 18.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn warm_start_empty_candidates() {
        let pp = single_pair();
        let candidates = Matrix::<f64>::zeros(0, 2);
        assert!(matches!(
            warm_start(&pp, &candidates),
            Err(PricingError::EmptyCandidates)
        ));
    }

    #[test]
    fn solve_pricing_zero_duals_returns_immediately() {
        let points = Matrix::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5]]);
        let pp = PricingProblem::from_parts(vec![0.0, 0.0], points.clone());
        let run = solve_pricing(&pp, &points, &AdamConfig::default()).unwrap();
        assert_eq!(run.iterations, 0);
        assert_eq!(run.value, 0.0);
        assert_eq!(run.point, vec![1.0, 2.0]);
    }

    #[test]
    fn solve_pricing_never_below_warm_start() {
        let pp = single_pair();
        let candidates = Matrix::from_rows(&[vec![3.0, 4.0], vec![0.0, 1.0]]);
        let run = solve_pricing(&pp, &candidates, &AdamConfig::default()).unwrap();
        assert!(run.value >= 18.0f64.sqrt() - 1e-12);
    }

    #[test]
    fn one_dimensional_two_point_instance() {
        // f(q) = |q-1| - |q+1|, |f| = 2 for |q| >= 1
        let points = Matrix::from_rows(&[vec![1.0], vec![-1.0]]);
        let pp = PricingProblem::from_parts(vec![1.0, -1.0], points.clone());
        let run = solve_pricing(&pp, &points, &AdamConfig::default()).unwrap();
        assert!(run.value > 1.9 && run.value <= 2.0 + 1e-12);
    }

    #[test]
    fn aggregated_form_matches_double_sum_oracle() {
        use crate::data::Dataset;
        use crate::master::DistanceColumns;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut features = Matrix::zeros(0, 3);
        let mut labels = Vec::new();
        for i in 0..9 {
            let row: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            features.push_row(&row);
            labels.push(if i < 4 { 1 } else { -1 });
        }
        let ds = Dataset::new("rand", features, labels).unwrap();
        let cols = DistanceColumns::for_dataset(&ds).unwrap();
        let pi: Vec<f64> = (0..cols.n_pairs()).map(|_| rng.random_range(0.0..1.0)).collect();
        let pp = PricingProblem::from_duals(&ds, &cols, &pi).unwrap();

        // net coefficients of the two classes balance
        let total: f64 = pp.coeffs().iter().sum();
        assert!(total.abs() < 1e-12);

        for _ in 0..20 {
            let q: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            // literal double sum over pairs
            let mut oracle = 0.0;
            for (k, &(p, n)) in cols.pairs().iter().enumerate() {
                oracle += pi[k]
                    * (euclidean(ds.row(p), &q) - euclidean(ds.row(n), &q));
            }
            let fast = pp.signed_value(&q).unwrap();
            assert!((fast - oracle).abs() <= 1e-10, "{fast} vs {oracle}");
        }
    }

    #[test]
    fn far_field_gradient_vanishes() {
        let pp = single_pair();
        let r = 1e6 * 5.0; // a million data radii out
        let g = pp.gradient(&[r, r]).unwrap();
        let norm = (g[0] * g[0] + g[1] * g[1]).sqrt();
        assert!(norm <= 1e-3, "far-field gradient norm {norm}");
    }
}
