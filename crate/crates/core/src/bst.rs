//! The discrete tree-growth chain: at each step a uniformly chosen leaf
//! becomes internal and gains two leaf children.
//!
//! Under i.i.d. continuous keys this is exactly the shape process of a
//! binary search tree, so the module also provides the key-driven
//! construction and the sequential ranks of a key sequence, which the law
//! tests compare against the chain.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::tree::{BinaryTree, Profile};
use crate::word::NodeWord;

/// The growth chain together with its insertion-depth history.
#[derive(Clone, Debug)]
pub struct BstChain {
    tree: BinaryTree,
    depths: Vec<u16>,
}

impl Default for BstChain {
    fn default() -> Self {
        Self::new()
    }
}

impl BstChain {
    pub fn new() -> Self {
        BstChain {
            tree: BinaryTree::new(),
            depths: Vec::new(),
        }
    }

    /// Number of completed insertions.
    pub fn n(&self) -> usize {
        self.tree.internal_count()
    }

    pub fn tree(&self) -> &BinaryTree {
        &self.tree
    }

    /// Depths `d_0, d_1, ...` of the successive insertions.
    pub fn depth_history(&self) -> &[u16] {
        &self.depths
    }

    /// One uniform-leaf split; returns the insertion depth.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> u16 {
        let i = rng.random_range(0..self.tree.leaf_count());
        let split = self.tree.split_leaf_at(i);
        let d = split.depth() as u16;
        self.depths.push(d);
        d
    }

    /// Runs the chain until `n` insertions have been made.
    pub fn run_to<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) {
        while self.n() < n {
            self.step(rng);
        }
    }
}

/// Depth-only variant of [`BstChain`] for statistics that ignore shape.
///
/// It draws the same uniform leaf index stream and keeps only the leaf
/// depths, so with a shared generator it produces bit-identical depth data
/// at a fraction of the cost; profiles, insertion depths and path lengths
/// have exactly the chain's law.
#[derive(Clone, Debug)]
pub struct DepthChain {
    leaf_depths: Vec<u16>,
    epl: u64,
}

impl Default for DepthChain {
    fn default() -> Self {
        Self::new()
    }
}

impl DepthChain {
    pub fn new() -> Self {
        DepthChain {
            leaf_depths: alloc::vec![0],
            epl: 0,
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        let mut leaf_depths = Vec::with_capacity(n + 1);
        leaf_depths.push(0);
        DepthChain { leaf_depths, epl: 0 }
    }

    pub fn n(&self) -> usize {
        self.leaf_depths.len() - 1
    }

    /// One uniform-leaf split; returns the insertion depth.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> u16 {
        let i = rng.random_range(0..self.leaf_depths.len());
        let d = self.leaf_depths[i];
        self.leaf_depths[i] = d + 1;
        self.leaf_depths.push(d + 1);
        // removing a depth-d leaf and adding two at d+1
        self.epl += d as u64 + 2;
        d
    }

    pub fn run_to<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) {
        self.leaf_depths.reserve(n.saturating_sub(self.n()));
        while self.n() < n {
            self.step(rng);
        }
    }

    pub fn profile(&self) -> Profile {
        Profile::from_depths(self.leaf_depths.iter().map(|&d| d as u32))
    }

    /// Sum of leaf depths.
    pub fn external_path_length(&self) -> u64 {
        self.epl
    }

    pub fn extremal_depths(&self) -> (u16, u16) {
        let mut lo = u16::MAX;
        let mut hi = 0;
        for &d in &self.leaf_depths {
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo, hi)
    }
}

/// A sequence of pairwise distinct keys in the open unit interval.
#[derive(Clone, Debug, PartialEq)]
pub struct KeySequence {
    keys: Vec<f64>,
}

/// Rejected key sequences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KeyError {
    /// Two equal keys (the model assumes a continuous law, ties are
    /// rejected rather than broken).
    Duplicate(f64),
    /// A key outside `(0, 1)`.
    OutOfRange(f64),
}

impl fmt::Display for KeyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeyError::Duplicate(x) => write!(f, "duplicate key {x}"),
            KeyError::OutOfRange(x) => write!(f, "key {x} outside (0, 1)"),
        }
    }
}

impl core::error::Error for KeyError {}

impl KeySequence {
    pub fn new(keys: Vec<f64>) -> Result<Self, KeyError> {
        let mut sorted = keys.clone();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN key"));
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(KeyError::Duplicate(w[0]));
            }
        }
        for &k in &keys {
            if !(0.0 < k && k < 1.0) {
                return Err(KeyError::OutOfRange(k));
            }
        }
        Ok(KeySequence { keys })
    }

    /// Draws `n` i.i.d. uniform keys (almost surely distinct).
    pub fn uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let keys: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            if let Ok(seq) = KeySequence::new(keys) {
                return seq;
            }
        }
    }

    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Builds the search tree of a key sequence: each key descends from the
/// root (left if smaller, right if larger) and occupies the first empty
/// leaf it reaches. Returns the node word of every insertion together with
/// the final shape.
pub fn build_from_keys(keys: &KeySequence) -> (Vec<NodeWord>, BinaryTree) {
    let mut labels: BTreeMap<NodeWord, f64> = BTreeMap::new();
    let mut tree = BinaryTree::new();
    let mut trace = Vec::with_capacity(keys.len());
    for &x in keys.keys() {
        let mut at = NodeWord::ROOT;
        while let Some(&label) = labels.get(&at) {
            at = if x < label { at.child(0) } else { at.child(1) };
        }
        labels.insert(at, x);
        trace.push(at);
        tree.split_leaf(at).expect("descent ends at a leaf");
    }
    (trace, tree)
}

/// Sequential ranks `R_k = #{j <= k : x_j <= x_k}` of a key sequence.
///
/// For i.i.d. continuous keys the ranks are independent with `R_k` uniform
/// on `{1, ..., k}`; this is what makes uniform-leaf insertion the right
/// chain.
pub fn sequential_ranks(keys: &KeySequence) -> Vec<usize> {
    let xs = keys.keys();
    xs.iter()
        .enumerate()
        .map(|(k, &x)| xs[..=k].iter().filter(|&&y| y <= x).count())
        .collect()
}
