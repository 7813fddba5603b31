//! Ranking metrics: the pairwise AUC statistic and the active-weight count.
//!
//! AUC here is the fraction of (positive, negative) score pairs ranked by
//! strict inequality; tied pairs contribute zero. This matches the indicator
//! convention used by the trainers' convergence statistic, so the value
//! optimized during training and the value reported afterwards are the same
//! quantity. The Mann-Whitney half-tie variant is deliberately not provided.

use thiserror::Error;

use crate::scalar::Real;

/// Default magnitude threshold for counting a weight as active.
pub const ACTIVE_WEIGHT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("score pair needs at least one positive and one negative score")]
    EmptyClass,
    #[error("scores must be finite")]
    NonFiniteScore,
}

/// Scores of the positive and negative samples under one model.
#[derive(Debug, Clone)]
pub struct ScorePair<T> {
    pos: Vec<T>,
    neg: Vec<T>,
}

impl<T: Real> ScorePair<T> {
    pub fn new(pos: Vec<T>, neg: Vec<T>) -> Result<Self, MetricsError> {
        if pos.is_empty() || neg.is_empty() {
            return Err(MetricsError::EmptyClass);
        }
        if pos.iter().chain(neg.iter()).any(|s| !s.is_finite()) {
            return Err(MetricsError::NonFiniteScore);
        }
        Ok(Self { pos, neg })
    }

    pub fn pos(&self) -> &[T] {
        &self.pos
    }

    pub fn neg(&self) -> &[T] {
        &self.neg
    }

    fn n_pairs(&self) -> u64 {
        self.pos.len() as u64 * self.neg.len() as u64
    }
}

/// Number of (p, n) pairs with `pos[p] > neg[n]`, by sorting and binary
/// search. Contractually identical to the double loop in [`auc_bruteforce`].
fn ranked_pair_count<T: Real>(sp: &ScorePair<T>) -> u64 {
    let mut neg = sp.neg.clone();
    neg.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let mut count = 0u64;
    for &p in &sp.pos {
        // number of negatives strictly below p
        count += neg.partition_point(|&n| n < p) as u64;
    }
    count
}

/// Pairwise AUC with strict inequality (ties count zero).
pub fn auc<T: Real>(sp: &ScorePair<T>) -> T {
    let count = ranked_pair_count(sp);
    T::from_u64(count).unwrap() / T::from_u64(sp.n_pairs()).unwrap()
}

/// Literal double loop over all pairs; the oracle for [`auc`].
pub fn auc_bruteforce<T: Real>(sp: &ScorePair<T>) -> T {
    let mut count = 0u64;
    for &p in &sp.pos {
        for &n in &sp.neg {
            if p > n {
                count += 1;
            }
        }
    }
    T::from_u64(count).unwrap() / T::from_u64(sp.n_pairs()).unwrap()
}

/// Number of weights with magnitude at or above `threshold` (the boundary
/// counts as active).
pub fn active_count<T: Real>(weights: &[T], threshold: T) -> usize {
    assert!(threshold > T::zero(), "threshold must be positive");
    weights.iter().filter(|w| w.abs() >= threshold).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(pos: &[f64], neg: &[f64]) -> ScorePair<f64> {
        ScorePair::new(pos.to_vec(), neg.to_vec()).unwrap()
    }

    #[test]
    fn perfect_separation() {
        assert_eq!(auc(&sp(&[0.9, 0.8], &[0.1, 0.2])), 1.0);
    }

    #[test]
    fn tie_counts_zero() {
        assert_eq!(auc(&sp(&[0.5], &[0.5])), 0.0);
    }

    #[test]
    fn half_ranked() {
        // pairs: (0.3, 0.5) wrong, (0.7, 0.5) right
        assert_eq!(auc(&sp(&[0.3, 0.7], &[0.5])), 0.5);
    }

    #[test]
    fn bruteforce_trivial() {
        assert_eq!(auc_bruteforce(&sp(&[1.0, 2.0, 3.0], &[0.0])), 1.0);
    }

    #[test]
    fn empty_class_rejected() {
        assert!(matches!(
            ScorePair::<f64>::new(vec![], vec![0.0]),
            Err(MetricsError::EmptyClass)
        ));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(ScorePair::new(vec![f64::NAN], vec![0.0]).is_err());
    }

    #[test]
    fn active_count_boundary() {
        assert_eq!(active_count(&[0.0, 0.0005, -0.002], 0.001), 1);
        assert_eq!(active_count::<f64>(&[], 0.001), 0);
        // the boundary value itself is active
        assert_eq!(active_count(&[0.001], 0.001), 1);
    }

    #[test]
    fn works_in_f32() {
        // pairs: (0.9, 0.1) ranked, (0.9, 0.9) tied, (0.8, 0.1) ranked,
        // (0.8, 0.9) wrong
        let sp = ScorePair::<f32>::new(vec![0.9, 0.8], vec![0.1, 0.9]).unwrap();
        assert_eq!(auc(&sp), auc_bruteforce(&sp));
        assert_eq!(auc(&sp), 0.5);
    }
}
