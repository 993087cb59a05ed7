//! Property tests for the structural and algebraic invariants.

use bstlab_core::bst::{KeySequence, build_from_keys, sequential_ranks};
use bstlab_core::exact;
use bstlab_core::martingale;
use bstlab_core::tree::BinaryTree;
use bstlab_core::word::NodeWord;

use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

fn tree_from_choices(choices: &[u8]) -> BinaryTree {
    let mut t = BinaryTree::new();
    for &c in choices {
        let i = c as usize % t.leaf_count();
        t.split_leaf_at(i);
    }
    t
}

proptest! {
    #[test]
    fn grown_trees_satisfy_all_invariants(choices in proptest::collection::vec(any::<u8>(), 0..60)) {
        let t = tree_from_choices(&choices);
        // prefix closure, child pairing and Kraft equality
        t.validate().unwrap();
        prop_assert_eq!(t.leaf_count(), t.internal_count() + 1);
        prop_assert_eq!(t.internal_count(), choices.len());
        let p = t.profile();
        prop_assert!(p.kraft_is_one());
        prop_assert_eq!(p.leaf_count() as usize, t.leaf_count());
        prop_assert_eq!(p.external_path_length(), t.external_path_length());
        // leaf counts by subtree are consistent with the leaf total
        let counts = t.subtree_leaf_counts();
        prop_assert_eq!(counts[&NodeWord::ROOT], t.leaf_count() as u64);
    }

    #[test]
    fn preorder_serialization_roundtrips(choices in proptest::collection::vec(any::<u8>(), 0..40)) {
        let t = tree_from_choices(&choices);
        let bits = t.preorder_bits();
        prop_assert_eq!(bits.len(), 2 * t.leaf_count() - 1);
        let back = BinaryTree::from_preorder_bits(&bits).unwrap();
        prop_assert_eq!(back.leaf_set(), t.leaf_set());
    }

    #[test]
    fn key_construction_builds_valid_trees(raw in proptest::collection::vec(1u32..u32::MAX, 1..40)) {
        // map to distinct keys in (0,1); duplicates are discarded
        let mut keys: Vec<f64> = raw.iter().map(|&r| r as f64 / u32::MAX as f64).collect();
        keys.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        keys.dedup();
        // shuffle deterministically by value hash to avoid sorted-order combs only
        keys.sort_unstable_by_key(|x| (x * 1e9) as u64 % 101);
        let seq = KeySequence::new(keys.clone()).unwrap();
        let (trace, tree) = build_from_keys(&seq);
        tree.validate().unwrap();
        prop_assert_eq!(tree.internal_count(), keys.len());
        prop_assert_eq!(trace.len(), keys.len());
        // ranks stay in range
        for (k, r) in sequential_ranks(&seq).iter().enumerate() {
            prop_assert!((1..=k + 1).contains(r));
        }
    }

    #[test]
    fn depth_pmfs_are_probability_vectors(n in 1usize..40, num in 1i64..8, den in 1i64..8) {
        let w = exact::rational(num, den);
        let pmf = exact::spine_depth_pmf_rational(n, &w);
        let total: exact::Rational = pmf.iter().sum();
        prop_assert_eq!(total, exact::Rational::one());
        prop_assert!(pmf.iter().all(|p| p >= &exact::Rational::zero()));
    }

    #[test]
    fn martingale_is_one_at_unit_parameter(choices in proptest::collection::vec(any::<u8>(), 0..50)) {
        let t = tree_from_choices(&choices);
        let m = martingale::bst_martingale(&t.profile(), 1.0).unwrap();
        prop_assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn connection_identity_on_random_trees(
        choices in proptest::collection::vec(any::<u8>(), 0..50),
        z_raw in 0.05f64..1.0,
        tau in 0.01f64..12.0,
    ) {
        // M(tau, z) = e^{tau(1-2z)} C_n(z) M_n(z) for z in (0.2, 2.2)
        let t = tree_from_choices(&choices);
        let p = t.profile();
        let z = 0.2 + 2.0 * z_raw;
        let lhs = martingale::yule_martingale(&p, tau, z);
        let rhs = martingale::time_component(t.internal_count() as u64, tau, z).unwrap()
            * martingale::bst_martingale(&p, z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1e-300), "z={z} lhs={lhs} rhs={rhs}");
    }

    #[test]
    fn exact_rational_martingale_matches_float(choices in proptest::collection::vec(any::<u8>(), 0..24)) {
        let t = tree_from_choices(&choices);
        let p = t.profile();
        let z = exact::rational(3, 4);
        let exact_m = martingale::bst_martingale_rational(&p, &z).unwrap();
        let float_m = martingale::bst_martingale(&p, 0.75).unwrap();
        prop_assert!((exact_m.to_f64().unwrap() - float_m).abs() < 1e-10);
    }

    #[test]
    fn projection_identity_always_holds(choices in proptest::collection::vec(any::<u8>(), 0..40), z_raw in 0.05f64..1.0) {
        let t = tree_from_choices(&choices);
        let z = 0.2 + 2.0 * z_raw;
        let (lhs, rhs) = bstlab_core::tilted::projection_identity(&t, z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }
}
