//! Property tests for the AUC statistic.

use proptest::prelude::*;

use rankcg::metrics::{auc, auc_bruteforce, ScorePair};

fn scores() -> impl Strategy<Value = Vec<f64>> {
    // coarse grid plus continuous values so ties actually occur
    prop::collection::vec(
        prop_oneof![
            (-5i32..=5).prop_map(|v| v as f64 * 0.25),
            -1.0f64..1.0f64,
        ],
        1..40,
    )
}

proptest! {
    #[test]
    fn fast_auc_equals_bruteforce(pos in scores(), neg in scores()) {
        let sp = ScorePair::new(pos, neg).unwrap();
        prop_assert_eq!(auc(&sp), auc_bruteforce(&sp));
    }

    #[test]
    fn permutation_within_class_is_irrelevant(pos in scores(), neg in scores()) {
        let base = auc(&ScorePair::new(pos.clone(), neg.clone()).unwrap());
        let mut pos_rev = pos;
        let mut neg_rev = neg;
        pos_rev.reverse();
        neg_rev.reverse();
        let permuted = auc(&ScorePair::new(pos_rev, neg_rev).unwrap());
        prop_assert_eq!(base, permuted);
    }

    #[test]
    fn strictly_increasing_transform_preserves_auc(pos in scores(), neg in scores()) {
        let base = auc(&ScorePair::new(pos.clone(), neg.clone()).unwrap());
        // x -> 2x + atan(x) is strictly increasing and keeps ties tied
        let f = |v: f64| 2.0 * v + v.atan();
        let mapped = auc(&ScorePair::new(
            pos.iter().copied().map(f).collect(),
            neg.iter().copied().map(f).collect(),
        ).unwrap());
        prop_assert_eq!(base, mapped);
    }
}
