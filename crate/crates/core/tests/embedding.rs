//! Law-level agreement between the three tree generators and the exact
//! oracles: the continuous-time jump chain, the uniform-insertion chain
//! and the key-driven construction must all produce the same shape
//! distribution, and insertion depths must follow the exact pmf.

use bstlab_core::bst::{BstChain, KeySequence, build_from_keys};
use bstlab_core::exact;
use bstlab_core::stats;
use bstlab_core::streams::replicate_stream;
use bstlab_core::tree::BinaryTree;
use bstlab_core::yule::{self, StopRule};

use num_traits::ToPrimitive;
use std::collections::BTreeMap;

fn shape_cells(n: usize) -> (Vec<BinaryTree>, BTreeMap<String, usize>, Vec<f64>) {
    let shapes = exact::enumerate_shapes(n).unwrap();
    let dist = exact::shape_distribution_chain_dp(n).unwrap();
    let index: BTreeMap<String, usize> = shapes
        .iter()
        .enumerate()
        .map(|(i, t)| (t.preorder_bits(), i))
        .collect();
    let probs = dist.cell_probs_f64(&shapes);
    (shapes, index, probs)
}

#[test]
fn all_generators_match_the_exact_shape_law_at_n5() {
    let n = 5;
    let reps = 20_000u64;
    let (_, index, probs) = shape_cells(n);

    let mut counts = vec![vec![0u64; probs.len()]; 3];
    for rep in 0..reps {
        let mut rng = replicate_stream(101, rep);
        let path = yule::simulate(StopRule::AtLeaves(n + 1), &mut rng);
        counts[0][index[&path.final_tree().preorder_bits()]] += 1;

        let mut rng = replicate_stream(102, rep);
        let mut chain = BstChain::new();
        chain.run_to(n, &mut rng);
        counts[1][index[&chain.tree().preorder_bits()]] += 1;

        let mut rng = replicate_stream(103, rep);
        let keys = KeySequence::uniform(n, &mut rng);
        let (_, tree) = build_from_keys(&keys);
        counts[2][index[&tree.preorder_bits()]] += 1;
    }
    for (name, c) in ["jump chain", "insertion chain", "keys"].iter().zip(&counts) {
        let rep = stats::chi_square(c, &probs).unwrap();
        assert!(rep.passes(0.001), "{name}: p = {}", rep.p_value);
    }
}

#[test]
fn chain_and_key_shape_laws_match_at_n6_pairwise() {
    // two-generator cross-check at a second size, against the product
    // formula route this time
    let n = 6;
    let shapes = exact::enumerate_shapes(n).unwrap();
    let dist = exact::shape_distribution_product_formula(n).unwrap();
    let index: BTreeMap<String, usize> = shapes
        .iter()
        .enumerate()
        .map(|(i, t)| (t.preorder_bits(), i))
        .collect();
    let probs = dist.cell_probs_f64(&shapes);
    let reps = 30_000u64;
    let mut counts = vec![0u64; probs.len()];
    for rep in 0..reps {
        let mut rng = replicate_stream(104, rep);
        let mut chain = BstChain::new();
        chain.run_to(n, &mut rng);
        counts[index[&chain.tree().preorder_bits()]] += 1;
    }
    let rep = stats::chi_square(&counts, &probs).unwrap();
    assert!(rep.passes(0.001), "p = {}", rep.p_value);
}

#[test]
fn insertion_depth_empirical_law_matches_exact_pmf() {
    let n = 40usize;
    let pmf: Vec<f64> = exact::insertion_depth_pmf(n)
        .iter()
        .map(|p| p.to_f64().unwrap())
        .collect();
    let reps = 20_000u64;
    let mut counts = vec![0u64; pmf.len()];
    for rep in 0..reps {
        let mut rng = replicate_stream(105, rep);
        let mut chain = BstChain::new();
        chain.run_to(n + 1, &mut rng);
        counts[chain.depth_history()[n] as usize] += 1;
    }
    let rep = stats::chi_square(&counts, &pmf).unwrap();
    assert!(rep.passes(0.001), "p = {}", rep.p_value);
}

#[test]
fn jump_times_are_independent_of_shape() {
    // correlation between tau_5 and the height of the jump-chain tree
    let reps = 20_000;
    let mut taus = Vec::with_capacity(reps);
    let mut heights = Vec::with_capacity(reps);
    for rep in 0..reps {
        let mut rng = replicate_stream(106, rep as u64);
        let path = yule::simulate(StopRule::AtLeaves(6), &mut rng);
        taus.push(path.jump_time(5).unwrap());
        heights.push(path.final_tree().extremal_depths().1 as f64);
    }
    let c = stats::correlation(&taus, &heights);
    let bound = 3.0 / (reps as f64).sqrt();
    assert!(c.abs() < bound, "corr = {c}, bound = {bound}");
}

#[test]
fn xi_estimates_stabilize_along_paths() {
    // |n e^{-tau_n} - 2n e^{-tau_2n}| shrinks as n grows (a.s. convergence
    // proxy on coupled paths)
    let reps = 400;
    let mut deltas_small = Vec::with_capacity(reps);
    let mut deltas_large = Vec::with_capacity(reps);
    for rep in 0..reps {
        let mut rng = replicate_stream(107, rep as u64);
        let path = yule::simulate(StopRule::AtLeaves(2001), &mut rng);
        deltas_small.push((path.xi_estimate(200).unwrap() - path.xi_estimate(100).unwrap()).abs());
        deltas_large.push((path.xi_estimate(2000).unwrap() - path.xi_estimate(1000).unwrap()).abs());
    }
    let small = stats::median(&deltas_small);
    let large = stats::median(&deltas_large);
    assert!(
        large < small,
        "median |delta| at n=1000: {large}, at n=100: {small}"
    );
}

#[test]
fn depth_drift_approaches_two_log_n() {
    let mean_ratio = |n: usize, seed: u64, reps: u64| -> f64 {
        let mut sum = 0.0;
        for rep in 0..reps {
            let mut rng = replicate_stream(seed, rep);
            let mut chain = bstlab_core::bst::DepthChain::with_capacity(n + 1);
            chain.run_to(n, &mut rng);
            let mut rng2 = replicate_stream(seed ^ 0xffff, rep);
            let d = {
                // one more step to read d_n
                let mut c = chain.clone();
                c.step(&mut rng2) as f64
            };
            sum += d / (2.0 * (n as f64).ln());
        }
        sum / reps as f64
    };
    let at_small = mean_ratio(200, 108, 600);
    let at_large = mean_ratio(20_000, 109, 600);
    assert!(
        (at_large - 1.0).abs() < (at_small - 1.0).abs(),
        "|{at_large} - 1| should be below |{at_small} - 1|"
    );
}

#[test]
fn root_subtree_proportion_is_uniform() {
    // the left-subtree share of the leaves converges to a uniform variable;
    // at the root the finite-n law is already uniform on {1..n}/(n+1)
    let n = 4_000;
    let reps = 2_000;
    let mut props = Vec::with_capacity(reps);
    for rep in 0..reps {
        let mut rng = replicate_stream(112, rep as u64);
        let path = yule::simulate(StopRule::AtLeaves(n + 1), &mut rng);
        props.push(
            path.subtree_proportion(bstlab_core::word::NodeWord::ROOT, n)
                .unwrap(),
        );
    }
    let rep = stats::ks_test(&props, stats::uniform01_cdf).unwrap();
    assert!(rep.passes(0.001), "p = {}", rep.p_value);
}

#[test]
fn splitting_map_preserves_the_law_at_fixed_parameter() {
    // two-sample KS between direct martingale values and one application
    // of the splitting recursion to an independent pool, at z = 0.8
    use bstlab_core::martingale::{bst_martingale, splitting_map};
    let n = 2_000;
    let z = 0.8;
    let reps = 4_000usize;
    let values: Vec<f64> = (0..reps)
        .map(|rep| {
            let mut rng = replicate_stream(113, rep as u64);
            let mut chain = bstlab_core::bst::DepthChain::with_capacity(n);
            chain.run_to(n, &mut rng);
            bst_martingale(&chain.profile(), z).unwrap()
        })
        .collect();
    let (direct, pool) = values.split_at(reps / 2);
    let mut rng = replicate_stream(113, reps as u64 + 7);
    let mapped: Vec<f64> = pool
        .chunks_exact(2)
        .map(|pair| {
            let u: f64 = rand::Rng::random(&mut rng);
            splitting_map(pair[0], pair[1], u, z)
        })
        .collect();
    let rep = stats::two_sample_ks(direct, &mapped).unwrap();
    assert!(rep.passes(0.01), "p = {}", rep.p_value);
}

#[test]
fn continuous_derivative_martingale_has_mean_zero() {
    // E M'(t, z) = d/dz E M(t, z) = 0; Monte Carlo at t = 3, z = 1
    use bstlab_core::martingale::yule_derivative_martingale;
    let t = 3.0;
    let reps = 10_000;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for rep in 0..reps {
        let mut rng = replicate_stream(115, rep as u64);
        let path = yule::simulate(StopRule::PastTime(t), &mut rng);
        let n = path.leaves_at(t) - 1;
        let v = yule_derivative_martingale(&path.profile_at_jump(n).unwrap(), t, 1.0);
        sum += v;
        sumsq += v * v;
    }
    let mean = sum / reps as f64;
    let se = ((sumsq / reps as f64 - mean * mean) / reps as f64).sqrt();
    assert!(mean.abs() < 3.0 * se, "mean {mean}, 3se {}", 3.0 * se);
}

#[test]
fn time_component_approaches_the_limit_factor() {
    // e^{tau_n(1-2z)} C_n(z) and the plug-in limit factor built from
    // n e^{-tau_n} approach each other along every path
    use bstlab_core::martingale::{limit_connection_factor, time_component};
    let z = 1.4;
    let reps = 150;
    let mut dev_small = Vec::new();
    let mut dev_large = Vec::new();
    for rep in 0..reps {
        let mut rng = replicate_stream(114, rep as u64);
        let path = yule::simulate(StopRule::AtLeaves(5_001), &mut rng);
        let ratio_at = |n: usize| {
            let tc = time_component(n as u64, path.jump_time(n).unwrap(), z).unwrap();
            tc / limit_connection_factor(path.xi_estimate(n).unwrap(), z)
        };
        dev_small.push((ratio_at(100) - 1.0).abs());
        dev_large.push((ratio_at(5_000) - 1.0).abs());
    }
    assert!(stats::median(&dev_large) < stats::median(&dev_small));
}

#[test]
fn embedded_bst_equals_direct_chain_in_law() {
    // embedding consistency on one statistic: external path length at n=64
    let reps = 4_000;
    let mut epl_yule = Vec::with_capacity(reps);
    let mut epl_bst = Vec::with_capacity(reps);
    for rep in 0..reps {
        let mut rng = replicate_stream(110, rep as u64);
        let path = yule::simulate(StopRule::AtLeaves(65), &mut rng);
        epl_yule.push(path.final_tree().external_path_length() as f64);
        let mut rng = replicate_stream(111, rep as u64);
        let mut chain = BstChain::new();
        chain.run_to(64, &mut rng);
        epl_bst.push(chain.tree().external_path_length() as f64);
    }
    let rep = stats::two_sample_ks(&epl_yule, &epl_bst).unwrap();
    assert!(rep.passes(0.001), "p = {}", rep.p_value);
}
