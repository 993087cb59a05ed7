//! Spine-marked growth processes and exponential change of measure.
//!
//! One leaf of the tree is distinguished (the spine). Under the size-biased
//! marking, a leaf `u` of a fixed tree is marked with probability
//! `2^-|u|`; equivalently, the mark follows a uniform point of `(0, 1)`
//! through the dyadic fragments. Tilting by `2z` makes the marked leaf
//! split at rate `2z` (continuous time) or with probability `2z/(n+2z)`
//! (discrete chain) while unmarked leaves are unchanged; the Radon–Nikodym
//! derivative of the tilted law with respect to the marked unbiased one
//! after `n` steps is `(2z)^{s_n} / C_n(z)`, where `s_n` is the spine
//! depth. Under the tilted law `s_n` is exactly
//! `1 + sum_{k=1}^{n-1} Be(2z/(k+2z))` with independent summands.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::exact::{self, ExactError, Rational};
use crate::martingale;
use crate::stats;
use crate::tree::{BinaryTree, Profile};
use crate::word::NodeWord;
use crate::yule::{StopRule, exp_draw};

/// The tilt parameter `2z > 0`; `2z = 1` is the unbiased chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tilt {
    two_z: f64,
}

impl Tilt {
    pub fn new(two_z: f64) -> Option<Self> {
        (two_z > 0.0 && two_z.is_finite()).then_some(Tilt { two_z })
    }

    #[inline]
    pub fn two_z(self) -> f64 {
        self.two_z
    }

    #[inline]
    pub fn z(self) -> f64 {
        self.two_z / 2.0
    }
}

/// A complete binary tree with one marked leaf.
#[derive(Clone, Debug)]
pub struct MarkedTree {
    tree: BinaryTree,
    spine_idx: usize,
}

impl Default for MarkedTree {
    fn default() -> Self {
        Self::new()
    }
}

impl MarkedTree {
    /// The one-leaf tree with its root marked.
    pub fn new() -> Self {
        MarkedTree {
            tree: BinaryTree::new(),
            spine_idx: 0,
        }
    }

    /// Marks the given leaf of an existing tree.
    pub fn with_spine(tree: BinaryTree, spine: NodeWord) -> Option<Self> {
        let spine_idx = tree.leaves().iter().position(|&u| u == spine)?;
        Some(MarkedTree { tree, spine_idx })
    }

    pub fn tree(&self) -> &BinaryTree {
        &self.tree
    }

    pub fn spine(&self) -> NodeWord {
        self.tree.leaves()[self.spine_idx]
    }

    pub fn spine_depth(&self) -> u32 {
        self.spine().depth()
    }

    pub fn n(&self) -> usize {
        self.tree.internal_count()
    }

    /// One tilted step: the marked leaf splits with probability
    /// `2z/(n+2z)` and passes the mark to a uniform child; otherwise a
    /// uniform unmarked leaf splits.
    pub fn step<R: Rng + ?Sized>(&mut self, tilt: Tilt, rng: &mut R) {
        let n = self.tree.internal_count();
        let p_marked = tilt.two_z() / (n as f64 + tilt.two_z());
        if rng.random::<f64>() < p_marked {
            self.tree.split_leaf_at(self.spine_idx);
            if rng.random::<bool>() {
                // mark moves to the right child, pushed at the end
                self.spine_idx = self.tree.leaf_count() - 1;
            } // left child keeps the old index
        } else {
            let j = rng.random_range(0..n);
            let idx = if j >= self.spine_idx { j + 1 } else { j };
            self.tree.split_leaf_at(idx);
        }
    }

    pub fn run_to<R: Rng + ?Sized>(&mut self, n: usize, tilt: Tilt, rng: &mut R) {
        while self.n() < n {
            self.step(tilt, rng);
        }
    }
}

/// Depth-only tilted chain for spine statistics at scale (same law for
/// the spine depth and the profile as [`MarkedTree::step`]).
#[derive(Clone, Debug)]
pub struct MarkedDepthChain {
    depths: Vec<u16>,
    spine_idx: usize,
}

impl Default for MarkedDepthChain {
    fn default() -> Self {
        Self::new()
    }
}

impl MarkedDepthChain {
    pub fn new() -> Self {
        MarkedDepthChain {
            depths: alloc::vec![0],
            spine_idx: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.depths.len() - 1
    }

    pub fn spine_depth(&self) -> u16 {
        self.depths[self.spine_idx]
    }

    pub fn profile(&self) -> Profile {
        Profile::from_depths(self.depths.iter().map(|&d| d as u32))
    }

    #[inline]
    pub fn step<R: Rng + ?Sized>(&mut self, tilt: Tilt, rng: &mut R) {
        let n = self.depths.len() - 1;
        let p_marked = tilt.two_z() / (n as f64 + tilt.two_z());
        if rng.random::<f64>() < p_marked {
            let d = self.depths[self.spine_idx];
            self.depths[self.spine_idx] = d + 1;
            self.depths.push(d + 1);
            if rng.random::<bool>() {
                self.spine_idx = self.depths.len() - 1;
            }
        } else {
            let j = rng.random_range(0..n);
            let idx = if j >= self.spine_idx { j + 1 } else { j };
            let d = self.depths[idx];
            self.depths[idx] = d + 1;
            self.depths.push(d + 1);
        }
    }

    pub fn run_to<R: Rng + ?Sized>(&mut self, n: usize, tilt: Tilt, rng: &mut R) {
        self.depths.reserve(n.saturating_sub(self.n()));
        while self.n() < n {
            self.step(tilt, rng);
        }
    }
}

/// A realised tilted continuous-time trajectory.
///
/// With `N` leaves, the unmarked population splits at total rate `N - 1`
/// and the marked leaf at rate `2z`, so gaps are `Exp(N - 1 + 2z)` and the
/// marked leaf wins a jump with probability `2z/(N - 1 + 2z)`. Only the
/// marked leaf needs a private clock; the unmarked population uses the
/// jump-chain representation.
#[derive(Clone, Debug)]
pub struct BiasedYulePath {
    times: Vec<f64>,
    splits: Vec<NodeWord>,
    /// `(jump index, new spine)` at every mark move; starts with `(0, root)`.
    spine_changes: Vec<(usize, NodeWord)>,
    final_state: MarkedTree,
}

impl BiasedYulePath {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn splits(&self) -> &[NodeWord] {
        &self.splits
    }

    pub fn final_state(&self) -> &MarkedTree {
        &self.final_state
    }

    pub fn jump_count(&self) -> usize {
        self.times.len()
    }

    /// Number of leaves at time `t`.
    pub fn leaves_at(&self, t: f64) -> usize {
        1 + self.times.partition_point(|&tau| tau <= t)
    }

    /// Spine word at time `t`.
    pub fn spine_at(&self, t: f64) -> NodeWord {
        let jumps = self.times.partition_point(|&tau| tau <= t);
        let i = self
            .spine_changes
            .partition_point(|&(j, _)| j <= jumps);
        self.spine_changes[i - 1].1
    }

    /// Spine depth at time `t`.
    pub fn spine_depth_at(&self, t: f64) -> u32 {
        self.spine_at(t).depth()
    }
}

/// Simulates the tilted continuous-time process.
pub fn biased_simulate<R: Rng + ?Sized>(tilt: Tilt, stop: StopRule, rng: &mut R) -> BiasedYulePath {
    let mut state = MarkedTree::new();
    let mut times = Vec::new();
    let mut splits = Vec::new();
    let mut spine_changes = alloc::vec![(0usize, NodeWord::ROOT)];
    let mut clock = 0.0f64;
    loop {
        let leaves = state.tree.leaf_count();
        match stop {
            StopRule::AtLeaves(n) => {
                if leaves >= n {
                    break;
                }
            }
            StopRule::PastTime(t) => {
                if let Some(&last) = times.last()
                    && last > t
                {
                    break;
                }
            }
        }
        let rate = (leaves - 1) as f64 + tilt.two_z();
        clock += exp_draw(rng, rate);
        let split;
        if rng.random::<f64>() < tilt.two_z() / rate {
            split = state.spine();
            state.tree.split_leaf_at(state.spine_idx);
            if rng.random::<bool>() {
                state.spine_idx = state.tree.leaf_count() - 1;
            }
            spine_changes.push((times.len() + 1, state.spine()));
        } else {
            let j = rng.random_range(0..leaves - 1);
            let idx = if j >= state.spine_idx { j + 1 } else { j };
            split = state.tree.split_leaf_at(idx);
        }
        times.push(clock);
        splits.push(split);
    }
    BiasedYulePath {
        times,
        splits,
        spine_changes,
        final_state: state,
    }
}

/// Samples a leaf of a fixed tree with probability `2^-depth` by a uniform
/// random descent from the root (well-defined by the Kraft equality).
pub struct SizeBiasedSampler {
    leaves: BTreeSet<NodeWord>,
}

impl SizeBiasedSampler {
    pub fn new(tree: &BinaryTree) -> Self {
        SizeBiasedSampler {
            leaves: tree.leaf_set(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeWord {
        let mut w = NodeWord::ROOT;
        while !self.leaves.contains(&w) {
            w = w.child(rng.random::<bool>() as u8);
        }
        w
    }
}

/// One-shot [`SizeBiasedSampler`] draw.
pub fn size_biased_spine<R: Rng + ?Sized>(tree: &BinaryTree, rng: &mut R) -> NodeWord {
    SizeBiasedSampler::new(tree).sample(rng)
}

/// Discrete exponential spine martingale `(2z)^(s_n) / C_n(z)`; mean one
/// under the size-biased marked chain.
pub fn exponential_martingale_discrete(
    s_n: u32,
    n: u64,
    z: f64,
) -> Result<f64, martingale::MartingaleError> {
    if z <= 0.0 {
        return Err(martingale::MartingaleError::ForbiddenParameter);
    }
    Ok((s_n as f64 * (2.0 * z).ln() - martingale::ln_c_n(z, n)).exp())
}

/// Continuous exponential spine martingale `(2z)^(s(t)) e^(t(1-2z))`;
/// mean one under the marked (unbiased) process, where `s(t)` is a
/// unit-rate Poisson count.
pub fn exponential_martingale_continuous(s_t: u32, t: f64, z: f64) -> f64 {
    debug_assert!(z > 0.0 && t >= 0.0);
    (s_t as f64 * (2.0 * z).ln() + t * (1.0 - 2.0 * z)).exp()
}

/// Averaging the discrete exponential martingale over the size-biased mark
/// recovers the profile martingale: returns
/// `(M_n(z), sum over leaves of 2^-|u| (2z)^|u| / C_n(z))`, which must be
/// equal up to rounding.
pub fn projection_identity(tree: &BinaryTree, z: f64) -> Result<(f64, f64), martingale::MartingaleError> {
    let profile = tree.profile();
    let lhs = martingale::bst_martingale(&profile, z)?;
    let n = tree.internal_count() as u64;
    let inv_c = (-martingale::ln_c_n(z, n)).exp();
    let rhs: f64 = tree
        .leaves()
        .iter()
        .map(|u| {
            let d = u.depth() as f64;
            0.5f64.powf(d) * (2.0 * z).powf(d) * inv_c
        })
        .sum();
    Ok((lhs, rhs))
}

/// Exact-rational version of [`projection_identity`].
pub fn projection_identity_rational(
    tree: &BinaryTree,
    z: &Rational,
) -> Result<(Rational, Rational), martingale::MartingaleError> {
    let lhs = martingale::bst_martingale_rational(&tree.profile(), z)?;
    let n = tree.internal_count() as u64;
    let c = martingale::c_n_rational(z, n)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let two_z = z * BigRational::from(BigInt::from(2));
    let mut rhs = Rational::zero();
    for u in tree.leaves() {
        let mut w = Rational::one();
        for _ in 0..u.depth() {
            w *= &half;
            w *= &two_z;
        }
        rhs += w;
    }
    Ok((lhs, rhs / c))
}

/// Exhaustively enumerates marked histories of length `n` and returns
/// `(E_unbiased[E_n(z) f], E_tilted[f])` exactly; the two sides agree
/// because `E_n(z)` is the likelihood ratio of the tilted chain.
///
/// `n` is capped at 5 (history count grows like `n! 2^n`).
pub fn change_of_measure_check(
    n: usize,
    two_z: &Rational,
    statistic: &dyn Fn(&MarkedTree) -> Rational,
) -> Result<(Rational, Rational), ExactError> {
    if n > 5 {
        return Err(ExactError::TooLarge);
    }
    // C_n(z) written with the tilt weight: prod_{k<n} (k + 2z)/(k + 1)
    let mut c_n = Rational::one();
    for k in 0..n {
        c_n *= (two_z + Rational::from(BigInt::from(k as i64)))
            / Rational::from(BigInt::from(k as i64 + 1));
    }
    let mut lhs = Rational::zero();
    let mut rhs = Rational::zero();
    // stack of (state, unbiased prob, tilted prob)
    let mut stack = alloc::vec![(MarkedTree::new(), Rational::one(), Rational::one())];
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    while let Some((state, p1, pz)) = stack.pop() {
        let m = state.n();
        if m == n {
            let f = statistic(&state);
            let mut spine_weight = Rational::one();
            for _ in 0..state.spine_depth() {
                spine_weight *= two_z;
            }
            lhs += &p1 * spine_weight / &c_n * &f;
            rhs += &pz * f;
            continue;
        }
        let leaves = state.tree.leaf_count(); // m + 1
        let p1_step = Rational::new(BigInt::one(), BigInt::from(leaves));
        let pz_unmarked =
            Rational::one() / (Rational::from(BigInt::from(m as i64)) + two_z);
        let pz_marked_child = (two_z
            / (Rational::from(BigInt::from(m as i64)) + two_z))
            * &half;
        for i in 0..leaves {
            if i == state.spine_idx {
                for side in 0..2usize {
                    let mut next = state.clone();
                    next.tree.split_leaf_at(i);
                    if side == 1 {
                        next.spine_idx = next.tree.leaf_count() - 1;
                    }
                    stack.push((
                        next,
                        &p1 * &p1_step * &half,
                        &pz * &pz_marked_child,
                    ));
                }
            } else {
                let mut next = state.clone();
                next.tree.split_leaf_at(i);
                stack.push((next, &p1 * &p1_step, &pz * &pz_unmarked));
            }
        }
    }
    Ok((lhs, rhs))
}

/// Summary statistics of tilted spine-depth samples.
#[derive(Clone, Debug)]
pub struct SpineStats {
    /// `mean(s_n) / ln n`; tends to `2z`.
    pub lln_ratio: f64,
    /// Exact `E s_n / ln n` for comparison at finite `n`.
    pub lln_exact_ratio: f64,
    /// KS statistic of the exactly standardized (and dithered) samples
    /// against the standard normal.
    pub clt_ks: f64,
    /// Tail rate points from the exact pmf.
    pub ldp: Vec<LdpPoint>,
}

/// `-ln P(s_n > a ln n) / ln n` against the Poisson rate `eta_{2z}(a)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LdpPoint {
    pub a: f64,
    pub empirical_rate: f64,
    pub eta_rate: f64,
}

/// Tail rates of the exact spine-depth law at the given multipliers `a`.
pub fn ldp_curve(n: usize, two_z: f64, a_values: &[f64]) -> Vec<LdpPoint> {
    let ln_n = (n as f64).ln();
    let a_max = a_values.iter().cloned().fold(two_z, f64::max);
    let k_max = ((a_max * ln_n) * 2.5).ceil() as usize + 32;
    let pmf = exact::spine_depth_pmf(n, two_z, k_max);
    a_values
        .iter()
        .map(|&a| {
            let thr = a * ln_n;
            let tail: f64 = pmf
                .iter()
                .enumerate()
                .filter(|&(k, _)| k as f64 > thr)
                .map(|(_, &p)| p)
                .sum();
            LdpPoint {
                a,
                empirical_rate: -tail.ln() / ln_n,
                eta_rate: martingale::eta(two_z, a),
            }
        })
        .collect()
}

/// Law-of-large-numbers, CLT and large-deviation summaries for spine-depth
/// samples taken at size `n` under tilt `2z`.
///
/// Standardization uses the exact Bernoulli-sum mean and standard
/// deviation; `rng` supplies the jitter that maps the lattice samples to a
/// continuous variable before the KS comparison.
pub fn spine_statistics<R: Rng + ?Sized>(
    samples: &[u32],
    n: usize,
    two_z: f64,
    a_values: &[f64],
    rng: &mut R,
) -> SpineStats {
    let ln_n = (n as f64).ln();
    let mean: f64 = samples.iter().map(|&s| s as f64).sum::<f64>() / samples.len() as f64;
    let (mu, sd) = exact::tilted_depth_moments(n, two_z);
    let jittered = stats::dither(samples, rng);
    let standardized: Vec<f64> = jittered.iter().map(|x| (x - mu) / sd).collect();
    let clt_ks = stats::ks_test(&standardized, stats::normal_cdf)
        .expect("non-empty sample")
        .statistic;
    SpineStats {
        lln_ratio: mean / ln_n,
        lln_exact_ratio: mu / ln_n,
        clt_ks,
        ldp: ldp_curve(n, two_z, a_values),
    }
}

/// Poisson pmf vector on `0..=k_max` with a closing tail bucket, as
/// chi-square cells.
pub fn poisson_cells(lambda: f64, k_max: usize) -> Vec<f64> {
    let mut probs: Vec<f64> = (0..k_max as u64).map(|k| stats::poisson_pmf(lambda, k)).collect();
    let tail = 1.0 - probs.iter().sum::<f64>();
    probs.push(tail.max(0.0));
    probs
}
