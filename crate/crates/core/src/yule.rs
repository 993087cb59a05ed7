//! The continuous-time splitting process and its jump-chain realisation.
//!
//! Every leaf carries an independent unit-rate exponential lifetime, so
//! with `k` leaves alive the next split happens after an `Exp(k)` gap at a
//! uniformly chosen leaf, independently of the gap. Simulating (gap, jump)
//! pairs is therefore an exact realisation, and the tree sequence observed
//! at jump times is exactly the uniform-insertion chain of [`crate::bst`].
//!
//! Each node word also encodes a dyadic subinterval of `(0, 1)`; the leaf
//! intervals at any time partition the unit interval, which is the
//! fragmentation picture used by the spine constructions in
//! [`crate::tilted`].

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::tree::{BinaryTree, Profile};
use crate::word::NodeWord;

/// When to stop a simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopRule {
    /// Stop once the tree has this many leaves.
    AtLeaves(usize),
    /// Run through the first jump strictly after this time, so that both
    /// the state at `t` and the first insertion after `t` are determined.
    PastTime(f64),
}

/// Errors from querying a path beyond what was simulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HorizonExceeded;

impl fmt::Display for HorizonExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("query beyond the simulated horizon")
    }
}

impl core::error::Error for HorizonExceeded {}

/// A realised trajectory: jump times and the leaf split at each jump.
///
/// The tree at jump `n` is reconstructed by replaying the first `n`
/// splits; the final tree is kept.
#[derive(Clone, Debug)]
pub struct YulePath {
    times: Vec<f64>,
    splits: Vec<NodeWord>,
    final_tree: BinaryTree,
}

impl YulePath {
    /// Number of recorded jumps.
    pub fn jump_count(&self) -> usize {
        self.times.len()
    }

    /// `tau_n`, the time of the `n`-th jump (`n >= 1`).
    pub fn jump_time(&self, n: usize) -> Result<f64, HorizonExceeded> {
        if n == 0 || n > self.times.len() {
            return Err(HorizonExceeded);
        }
        Ok(self.times[n - 1])
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn splits(&self) -> &[NodeWord] {
        &self.splits
    }

    pub fn final_tree(&self) -> &BinaryTree {
        &self.final_tree
    }

    /// Number of leaves alive at time `t` (valid up to the last jump).
    pub fn leaves_at(&self, t: f64) -> usize {
        1 + self.times.partition_point(|&tau| tau <= t)
    }

    /// The jump-chain trees `T_0, ..., T_m` replayed from the split order.
    pub fn embedded_trees(&self) -> Vec<BinaryTree> {
        let mut out = Vec::with_capacity(self.splits.len() + 1);
        let mut t = BinaryTree::new();
        out.push(t.clone());
        for &w in &self.splits {
            t.split_leaf(w).expect("replayed split is a leaf");
            out.push(t.clone());
        }
        out
    }

    /// Tree after the first `n` jumps.
    pub fn tree_at_jump(&self, n: usize) -> Result<BinaryTree, HorizonExceeded> {
        if n > self.splits.len() {
            return Err(HorizonExceeded);
        }
        let mut t = BinaryTree::new();
        for &w in &self.splits[..n] {
            t.split_leaf(w).expect("replayed split is a leaf");
        }
        Ok(t)
    }

    /// Leaf profile after the first `n` jumps, replayed from depths only.
    pub fn profile_at_jump(&self, n: usize) -> Result<Profile, HorizonExceeded> {
        if n > self.splits.len() {
            return Err(HorizonExceeded);
        }
        let mut counts: Vec<u64> = alloc::vec![0; 2];
        counts[0] = 1;
        for &w in &self.splits[..n] {
            let d = w.depth() as usize;
            if counts.len() <= d + 1 {
                counts.resize(d + 2, 0);
            }
            counts[d] -= 1;
            counts[d + 1] += 2;
        }
        Ok(counts
            .iter()
            .enumerate()
            .map(|(k, &c)| (k as u32, c))
            .collect())
    }

    /// `n e^(-tau_n)`: the finite-`n` estimate of the exponential limit of
    /// `e^(-t) N_t`.
    pub fn xi_estimate(&self, n: usize) -> Result<f64, HorizonExceeded> {
        Ok(n as f64 * (-self.jump_time(n)?).exp())
    }

    /// Fraction of the leaves below `u` that lie below its left child
    /// (both children must exist at jump `n`). Converges to an independent
    /// uniform attached to `u`.
    pub fn subtree_proportion(&self, u: NodeWord, n: usize) -> Result<f64, HorizonExceeded> {
        let tree = self.tree_at_jump(n)?;
        let left = u.child(0);
        let mut below_left = 0u64;
        let mut below = 0u64;
        for &leaf in tree.leaves() {
            if u.is_prefix_of(leaf) {
                below += 1;
                if left.is_prefix_of(leaf) {
                    below_left += 1;
                }
            }
        }
        if below_left == 0 || below_left == below {
            // u0/u1 not both present at this jump
            return Err(HorizonExceeded);
        }
        Ok(below_left as f64 / below as f64)
    }

    /// Depth of the leaf that splits first strictly after `t`.
    pub fn next_insertion_depth(&self, t: f64) -> Result<u32, HorizonExceeded> {
        let idx = self.times.partition_point(|&tau| tau <= t);
        if idx >= self.splits.len() {
            return Err(HorizonExceeded);
        }
        Ok(self.splits[idx].depth())
    }
}

/// Unit-mean exponential draw by inversion.
#[inline]
pub fn exp_draw<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    // 1 - U avoids ln(0)
    -(1.0 - rng.random::<f64>()).ln() / rate
}

/// Simulates a trajectory: `Exp(k)` gaps and uniform leaf splits.
pub fn simulate<R: Rng + ?Sized>(stop: StopRule, rng: &mut R) -> YulePath {
    let mut tree = BinaryTree::new();
    let mut times = Vec::new();
    let mut splits = Vec::new();
    let mut clock = 0.0f64;
    loop {
        let leaves = tree.leaf_count();
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
        clock += exp_draw(rng, leaves as f64);
        let i = rng.random_range(0..leaves);
        let w = tree.split_leaf_at(i);
        times.push(clock);
        splits.push(w);
    }
    YulePath {
        times,
        splits,
        final_tree: tree,
    }
}

/// A dyadic subinterval `(num 2^-depth, (num+1) 2^-depth)` of `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    num: u128,
    depth: u32,
}

impl DyadicInterval {
    /// Exact left endpoint as `(numerator, log2 denominator)`.
    pub fn lo_exact(self) -> (u128, u32) {
        (self.num, self.depth)
    }

    /// Exact right endpoint as `(numerator, log2 denominator)`.
    pub fn hi_exact(self) -> (u128, u32) {
        (self.num + 1, self.depth)
    }

    pub fn lo(self) -> f64 {
        self.num as f64 / (self.depth as f64).exp2()
    }

    pub fn hi(self) -> f64 {
        (self.num as f64 + 1.0) / (self.depth as f64).exp2()
    }

    /// Interval length `2^-depth`.
    pub fn len(self) -> f64 {
        (-(self.depth as f64)).exp2()
    }

    /// Whether the open interval contains the dyadic point `p / 2^q`
    /// (`p < 2^q`, `q <= 128`). Exact integer comparison throughout.
    pub fn contains_dyadic(self, p: u128, q: u32) -> bool {
        debug_assert!(q <= 128);
        debug_assert!(q == 128 || p < (1u128 << q));
        if q == 0 {
            return false; // p/2^0 is an integer, never interior
        }
        // align both sides to 2^-128 resolution; shifts stay in range
        // because p < 2^q and num < 2^depth
        let a = if q == 128 { p } else { p << (128 - q) };
        if self.depth == 0 {
            return a > 0; // the root interval (0, 1)
        }
        let lo = if self.depth == 128 {
            self.num
        } else {
            self.num << (128 - self.depth)
        };
        if a <= lo {
            return false;
        }
        // the right endpoint of the rightmost interval is 1, which every
        // aligned point is below
        let rightmost = if self.depth == 128 {
            self.num == u128::MAX
        } else {
            self.num + 1 == (1u128 << self.depth)
        };
        rightmost || {
            let hi = if self.depth == 128 {
                self.num + 1
            } else {
                (self.num + 1) << (128 - self.depth)
            };
            a < hi
        }
    }
}

/// The dyadic interval encoded by a node word: successive letters halve
/// `(0, 1)` keeping the left (0) or right (1) half.
pub fn interval_of(u: NodeWord) -> DyadicInterval {
    DyadicInterval {
        num: u.path_value(),
        depth: u.depth(),
    }
}

/// Closed-form generating function of the depth of the first insertion
/// after time `t`: `E z^(d(t)) = (e^(t(2z-1)) - 1) / ((e^t - 1)(2z - 1))`,
/// extended by continuity at `2z = 1` to `t / (e^t - 1)`.
pub fn insertion_depth_pgf(t: f64, z: f64) -> f64 {
    debug_assert!(t > 0.0);
    let a = t * (2.0 * z - 1.0);
    // (e^a - 1)/a with a stable small-|a| branch
    let ratio = if a.abs() < 1e-8 { 1.0 + a / 2.0 } else { a.exp_m1() / a };
    t * ratio / t.exp_m1()
}
