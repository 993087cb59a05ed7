//! Monte Carlo criteria for the martingale families: the jump-time
//! factorisation, the depth-derivative limit, and degenerate limits at and
//! beyond criticality.

use anyhow::Result;

use bstlab_core::bst::DepthChain;
use bstlab_core::exact::quicksort_moments;
use bstlab_core::martingale::{
    bst_derivative_martingale, bst_martingale, critical_constants, depth_derivative_at_one,
    derivative_splitting_map, time_component, yule_martingale,
};
use bstlab_core::stats;
use bstlab_core::streams::replicate_stream;
use bstlab_core::yule::{StopRule, simulate};
use rand::Rng;

use super::AcceptanceConfig;
use crate::harness::{ReplicateSpec, par_samples, summarize};
use crate::report::{CheckReport, CriterionReport};

pub fn c03_factorisation_residual(cfg: &AcceptanceConfig) -> Result<CriterionReport> {
    let paths = cfg.usize("c3.paths")?;
    let n = cfg.usize("c3.n")?;
    let z_points = cfg.usize("c3.z_points")?;
    let cc = critical_constants(1e-12);
    // interior grid of the positive-limit interval
    let grid: Vec<f64> = (1..=z_points)
        .map(|j| cc.z_minus + j as f64 * (cc.z_plus - cc.z_minus) / (z_points as f64 + 1.0))
        .collect();
    let spec = ReplicateSpec::new(cfg.sub_seed(3, 0), paths);
    let residuals = par_samples(spec, |_, rng| {
        let path = simulate(StopRule::AtLeaves(n + 1), rng);
        let tau = path.jump_time(n).expect("simulated to n jumps");
        let profile = path.final_tree().profile();
        let mut worst = 0.0f64;
        for &z in &grid {
            let lhs = yule_martingale(&profile, tau, z);
            let rhs = time_component(n as u64, tau, z).expect("z > 0")
                * bst_martingale(&profile, z).expect("z > 0");
            worst = worst.max((lhs - rhs).abs() / lhs.abs());
        }
        worst
    });
    let max_residual = residuals.iter().cloned().fold(0.0f64, f64::max);
    let checks = vec![
        CheckReport::stat_at_most(
            format!("max relative residual over {paths} paths x {z_points} parameters"),
            max_residual,
            cfg.f64("c3.max_residual")?,
        )
        .with_detail(format!("paths to n = {n}")),
    ];
    Ok(CriterionReport::new(
        3,
        "jump-time factorisation holds to ten digits on simulated paths",
        checks,
    ))
}

pub fn c08_depth_derivative_limit(cfg: &AcceptanceConfig) -> Result<CriterionReport> {
    let n = cfg.usize("c8.n")?;
    let replicates = cfg.usize("c8.replicates")?;
    let spec = ReplicateSpec::new(cfg.sub_seed(8, 0), replicates);
    let values = par_samples(spec, |_, rng| {
        let mut chain = DepthChain::with_capacity(n);
        chain.run_to(n, rng);
        depth_derivative_at_one(chain.external_path_length(), n as u64)
    });
    let summary = summarize(&values);
    let (_, target_var) = quicksort_moments();
    let var = stats::variance(&values);

    // fixed-point map applied to pairs from one half, compared with the
    // untouched other half
    let half = values.len() / 2;
    let (a, b) = values.split_at(half);
    let mut rng = replicate_stream(cfg.sub_seed(8, 1), 0);
    let mapped: Vec<f64> = b
        .chunks_exact(2)
        .map(|pair| {
            let u: f64 = rng.random();
            derivative_splitting_map(pair[0], pair[1], 1.0, 1.0, 1.0, u, 1.0)
        })
        .collect();
    let ks = stats::two_sample_ks(a, &mapped)?;

    let checks = vec![
        CheckReport::stat_at_most(
            "mean within three standard errors of zero",
            summary.mean.abs(),
            3.0 * summary.std_error,
        ),
        CheckReport::stat_at_most(
            "variance within 5% of the fixed-point second moment",
            (var / target_var - 1.0).abs(),
            cfg.f64("c8.var_rel_tol")?,
        )
        .with_detail(format!("sample variance {var:.5}, target {target_var:.5}")),
        CheckReport::from_test(
            "one application of the fixed-point map preserves the law",
            ks,
            cfg.f64("c8.ks_alpha")?,
        ),
    ];
    Ok(CriterionReport::new(
        8,
        "depth-derivative limit: moments and fixed-point law",
        checks,
    ))
}

pub fn c09_degenerate_limits(cfg: &AcceptanceConfig) -> Result<CriterionReport> {
    let replicates = cfg.usize("c9.replicates")?;
    let z_null = cfg.f64("c9.z_null")?;
    let ladder: [usize; 4] = [100, 1_000, 10_000, 100_000];
    let z_plus = critical_constants(1e-12).z_plus;
    let spec = ReplicateSpec::new(cfg.sub_seed(9, 0), replicates);
    // coupled paths: each replicate grows one chain through the whole ladder
    let rows = par_samples(spec, |_, rng| {
        let mut chain = DepthChain::with_capacity(*ladder.last().unwrap());
        let mut out = [(0.0f64, 0.0f64); 4];
        for (i, &n) in ladder.iter().enumerate() {
            chain.run_to(n, rng);
            let profile = chain.profile();
            out[i] = (
                bst_martingale(&profile, z_null).expect("z > 0"),
                bst_derivative_martingale(&profile, z_plus).expect("z > 0"),
            );
        }
        out
    });
    let mut medians = [0.0f64; 4];
    let mut neg_fraction = [0.0f64; 4];
    for i in 0..4 {
        let col: Vec<f64> = rows.iter().map(|r| r[i].0).collect();
        medians[i] = stats::median(&col);
        neg_fraction[i] =
            rows.iter().filter(|r| r[i].1 < 0.0).count() as f64 / replicates as f64;
    }
    let median_decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let fraction_nondecreasing = neg_fraction.windows(2).all(|w| w[1] >= w[0]);
    let checks = vec![
        CheckReport::exact(
            format!("median value at parameter {z_null} decreases along the ladder"),
            median_decreasing,
        )
        .with_detail(format!("medians {medians:?} at sizes {ladder:?}")),
        CheckReport::exact(
            "fraction of negative derivatives at the upper critical parameter is nondecreasing",
            fraction_nondecreasing,
        )
        .with_detail(format!("fractions {neg_fraction:?} at sizes {ladder:?}")),
    ];
    Ok(CriterionReport::new(
        9,
        "degenerate limits: median decay and critical derivative signs",
        checks,
    ))
}
