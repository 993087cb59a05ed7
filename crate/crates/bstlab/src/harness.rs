//! Replicate-parallel Monte Carlo execution.
//!
//! Every replicate draws from its own counter-based stream keyed by
//! `(seed, replicate)`, results are collected into a vector indexed by
//! replicate, and reductions run in replicate order. Output is therefore a
//! pure function of the [`ReplicateSpec`] and the estimator, independent
//! of thread count and scheduling.

use bstlab_core::streams::{Stream, replicate_stream};
use rayon::prelude::*;

/// What to run: the RNG seed and the number of replicates. Model
/// parameters live in the estimator closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReplicateSpec {
    pub seed: u64,
    pub replicates: usize,
}

impl ReplicateSpec {
    pub fn new(seed: u64, replicates: usize) -> Self {
        ReplicateSpec { seed, replicates }
    }
}

/// Runs one estimator per replicate in parallel; the result vector is
/// ordered by replicate index.
pub fn par_samples<T, F>(spec: ReplicateSpec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut Stream) -> T + Sync,
{
    (0..spec.replicates as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_stream(spec.seed, i);
            f(i, &mut rng)
        })
        .collect()
}

/// Mean, standard error and normal 95% confidence interval of a
/// replicate-parallel estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McSummary {
    pub mean: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub replicates: usize,
}

pub fn monte_carlo<F>(spec: ReplicateSpec, f: F) -> McSummary
where
    F: Fn(&mut Stream) -> f64 + Sync,
{
    assert!(spec.replicates >= 2, "need at least two replicates");
    let values = par_samples(spec, |_, rng| f(rng));
    summarize(&values)
}

/// Deterministic (index-ordered) summary of replicate values.
pub fn summarize(values: &[f64]) -> McSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let std_error = (var / n).sqrt();
    McSummary {
        mean,
        std_error,
        ci95: (mean - 1.96 * std_error, mean + 1.96 * std_error),
        replicates: values.len(),
    }
}
