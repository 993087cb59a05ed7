//! Complete binary trees stored as indexable leaf arrays.
//!
//! A complete binary tree is a prefix-closed set of words in which children
//! come in pairs; it is determined by its leaf set (a maximal antichain
//! whose dyadic lengths sum to one). We store the leaves in a `Vec` so that
//! splitting a uniformly chosen leaf is O(1): the split leaf is replaced in
//! place by its left child and the right child is pushed at the end, which
//! never moves any other leaf.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::word::NodeWord;

/// A complete binary tree with `n` internal nodes and `n + 1` leaves.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryTree {
    leaves: Vec<NodeWord>,
}

/// Errors from leaf-splitting by explicit word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitError {
    /// The word is an internal node of the tree.
    NotALeaf,
    /// The word is not a node of the tree at all.
    NotInTree,
}

impl fmt::Display for SplitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitError::NotALeaf => f.write_str("node is internal, not a leaf"),
            SplitError::NotInTree => f.write_str("node is not in the tree"),
        }
    }
}

impl core::error::Error for SplitError {}

/// A violated structural invariant, reported by [`BinaryTree::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeInvariant {
    /// Two leaves on the same line of descent.
    NotAnAntichain(NodeWord, NodeWord),
    /// The dyadic leaf lengths do not sum to one.
    KraftViolation,
    /// No leaves at all.
    Empty,
}

impl fmt::Display for TreeInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeInvariant::NotAnAntichain(u, v) => {
                write!(f, "leaf {u} is an ancestor of leaf {v}")
            }
            TreeInvariant::KraftViolation => f.write_str("leaf lengths do not sum to 1"),
            TreeInvariant::Empty => f.write_str("tree has no leaves"),
        }
    }
}

impl core::error::Error for TreeInvariant {}

impl Default for BinaryTree {
    fn default() -> Self {
        Self::new()
    }
}

impl BinaryTree {
    /// The one-leaf tree `{root}`.
    pub fn new() -> Self {
        BinaryTree {
            leaves: alloc::vec![NodeWord::ROOT],
        }
    }

    /// Rebuilds a tree from an arbitrary leaf set.
    ///
    /// Returns `None` unless the words form the leaf set of a complete
    /// binary tree (non-empty antichain with Kraft sum exactly 1).
    pub fn from_leaves(leaves: Vec<NodeWord>) -> Option<Self> {
        let t = BinaryTree { leaves };
        t.validate().ok()?;
        Some(t)
    }

    /// Number of internal nodes (= number of completed insertions).
    #[inline]
    pub fn internal_count(&self) -> usize {
        self.leaves.len() - 1
    }

    #[inline]
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// The leaves, in insertion-dependent order.
    #[inline]
    pub fn leaves(&self) -> &[NodeWord] {
        &self.leaves
    }

    /// Splits the leaf at position `index` in the leaf array, keeping all
    /// other positions stable. Returns the split word.
    #[inline]
    pub fn split_leaf_at(&mut self, index: usize) -> NodeWord {
        let w = self.leaves[index];
        self.leaves[index] = w.child(0);
        self.leaves.push(w.child(1));
        w
    }

    /// Splits the given leaf (O(n) lookup; simulation paths use
    /// [`split_leaf_at`](Self::split_leaf_at)).
    pub fn split_leaf(&mut self, leaf: NodeWord) -> Result<(), SplitError> {
        match self.leaves.iter().position(|&u| u == leaf) {
            Some(i) => {
                self.split_leaf_at(i);
                Ok(())
            }
            None => {
                if self.contains(leaf) {
                    Err(SplitError::NotALeaf)
                } else {
                    Err(SplitError::NotInTree)
                }
            }
        }
    }

    /// Whether `w` is a node (internal or leaf) of the tree.
    pub fn contains(&self, w: NodeWord) -> bool {
        self.leaves.iter().any(|&u| w.is_prefix_of(u))
    }

    /// Whether `w` is a leaf.
    pub fn is_leaf(&self, w: NodeWord) -> bool {
        self.leaves.contains(&w)
    }

    /// The set of leaves as an ordered set (for repeated membership tests).
    pub fn leaf_set(&self) -> BTreeSet<NodeWord> {
        self.leaves.iter().copied().collect()
    }

    /// Leaf counts by depth.
    pub fn profile(&self) -> Profile {
        Profile::from_depths(self.leaves.iter().map(|u| u.depth()))
    }

    /// `(saturation level, height)`: minimum and maximum leaf depth.
    pub fn extremal_depths(&self) -> (u32, u32) {
        let mut lo = u32::MAX;
        let mut hi = 0;
        for u in &self.leaves {
            lo = lo.min(u.depth());
            hi = hi.max(u.depth());
        }
        (lo, hi)
    }

    /// Number of leaves descending from (or equal to) each node of the tree.
    pub fn subtree_leaf_counts(&self) -> BTreeMap<NodeWord, u64> {
        let mut counts = BTreeMap::new();
        for &leaf in &self.leaves {
            let mut v = leaf;
            loop {
                *counts.entry(v).or_insert(0) += 1;
                match v.parent() {
                    Some(p) => v = p,
                    None => break,
                }
            }
        }
        counts
    }

    /// Sum of leaf depths (external path length).
    pub fn external_path_length(&self) -> u64 {
        self.leaves.iter().map(|u| u.depth() as u64).sum()
    }

    /// Canonical shape key: preorder traversal, `1` for internal, `0` for
    /// leaf. The one-leaf tree is `"0"`.
    pub fn preorder_bits(&self) -> String {
        let set = self.leaf_set();
        let mut out = String::with_capacity(2 * self.leaves.len());
        // Explicit stack; traversal order is root, left subtree, right subtree.
        let mut stack = alloc::vec![NodeWord::ROOT];
        while let Some(w) = stack.pop() {
            if set.contains(&w) {
                out.push('0');
            } else {
                out.push('1');
                stack.push(w.child(1));
                stack.push(w.child(0));
            }
        }
        out
    }

    /// Inverse of [`preorder_bits`](Self::preorder_bits).
    pub fn from_preorder_bits(s: &str) -> Option<Self> {
        let mut leaves = Vec::new();
        let mut stack = alloc::vec![NodeWord::ROOT];
        for c in s.chars() {
            let w = stack.pop()?;
            match c {
                '0' => leaves.push(w),
                '1' => {
                    stack.push(w.child(1));
                    stack.push(w.child(0));
                }
                _ => return None,
            }
        }
        if !stack.is_empty() {
            return None;
        }
        Self::from_leaves(leaves)
    }

    /// Checks the structural invariants: non-empty antichain of leaves with
    /// Kraft sum exactly one (equivalently: prefix-closed node set with
    /// paired children).
    pub fn validate(&self) -> Result<(), TreeInvariant> {
        if self.leaves.is_empty() {
            return Err(TreeInvariant::Empty);
        }
        // Antichain check via pairwise prefix test (exact, O(n^2) worst case
        // but only used on test-scale trees).
        for (i, &u) in self.leaves.iter().enumerate() {
            for &v in &self.leaves[i + 1..] {
                if u.is_prefix_of(v) {
                    return Err(TreeInvariant::NotAnAntichain(u, v));
                }
                if v.is_prefix_of(u) {
                    return Err(TreeInvariant::NotAnAntichain(v, u));
                }
            }
        }
        if !self.kraft_is_one() {
            return Err(TreeInvariant::KraftViolation);
        }
        Ok(())
    }

    /// Exact Kraft equality: `sum over leaves of 2^(H - depth) == 2^H`.
    fn kraft_is_one(&self) -> bool {
        let h = self.leaves.iter().map(|u| u.depth()).max().unwrap_or(0);
        let mut sum = BigUint::ZERO;
        for u in &self.leaves {
            sum += BigUint::from(1u8) << (h - u.depth());
        }
        sum == BigUint::from(1u8) << h
    }
}

impl fmt::Debug for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryTree[{}]", self.preorder_bits())
    }
}

/// Leaf counts by depth: `counts[k]` = number of leaves at depth `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Profile {
    counts: BTreeMap<u32, u64>,
}

impl Profile {
    pub fn from_depths(depths: impl IntoIterator<Item = u32>) -> Self {
        let mut counts = BTreeMap::new();
        for d in depths {
            *counts.entry(d).or_insert(0) += 1;
        }
        Profile { counts }
    }

    /// Number of leaves at depth `k`.
    #[inline]
    pub fn count(&self, k: u32) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    /// Total number of leaves.
    pub fn leaf_count(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `(min depth, max depth)` with a leaf.
    pub fn support(&self) -> Option<(u32, u32)> {
        let lo = self.counts.keys().next()?;
        let hi = self.counts.keys().next_back()?;
        Some((*lo, *hi))
    }

    /// Sum of `k * counts[k]` (external path length).
    pub fn external_path_length(&self) -> u64 {
        self.counts.iter().map(|(&k, &c)| k as u64 * c).sum()
    }

    /// Iterates `(depth, count)` in increasing depth, skipping zeros.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    /// Exact Kraft equality test: `sum counts[k] 2^-k == 1`.
    pub fn kraft_is_one(&self) -> bool {
        let h = match self.support() {
            Some((_, hi)) => hi,
            None => return false,
        };
        let mut sum = BigUint::ZERO;
        for (k, c) in self.iter() {
            sum += BigUint::from(c) << (h - k);
        }
        sum == BigUint::from(1u8) << h
    }
}

impl FromIterator<(u32, u64)> for Profile {
    fn from_iter<T: IntoIterator<Item = (u32, u64)>>(iter: T) -> Self {
        let mut counts = BTreeMap::new();
        for (k, c) in iter {
            if c > 0 {
                *counts.entry(k).or_insert(0) += c;
            }
        }
        Profile { counts }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn w(s: &str) -> NodeWord {
        NodeWord::parse(s).unwrap()
    }

    #[test]
    fn first_split() {
        // {root} split at the root -> {root, 0, 1}
        let mut t = BinaryTree::new();
        t.split_leaf(NodeWord::ROOT).unwrap();
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.internal_count(), 1);
        assert!(t.is_leaf(w("0")) && t.is_leaf(w("1")));
        assert!(t.contains(NodeWord::ROOT) && !t.is_leaf(NodeWord::ROOT));
        t.validate().unwrap();
    }

    #[test]
    fn second_split_by_word() {
        let mut t = BinaryTree::new();
        t.split_leaf(NodeWord::ROOT).unwrap();
        t.split_leaf(w("0")).unwrap();
        assert_eq!(t.leaf_count(), 3);
        assert!(t.is_leaf(w("00")) && t.is_leaf(w("01")) && t.is_leaf(w("1")));
        t.validate().unwrap();
    }

    #[test]
    fn split_errors() {
        let mut t = BinaryTree::new();
        t.split_leaf(NodeWord::ROOT).unwrap();
        assert_eq!(t.split_leaf(NodeWord::ROOT), Err(SplitError::NotALeaf));
        assert_eq!(t.split_leaf(w("00")), Err(SplitError::NotInTree));
    }

    #[test]
    fn profile_after_two_splits() {
        // Splitting at depth 0 then at depth 1 gives profile {1:1, 2:2},
        // whichever depth-1 leaf is chosen (n = 2 enumeration).
        for second in ["0", "1"] {
            let mut t = BinaryTree::new();
            t.split_leaf(NodeWord::ROOT).unwrap();
            t.split_leaf(w(second)).unwrap();
            let p = t.profile();
            assert_eq!(p.count(1), 1);
            assert_eq!(p.count(2), 2);
            assert_eq!(p.leaf_count(), 3);
            assert!(p.kraft_is_one());
            assert_eq!(t.extremal_depths(), (1, 2));
        }
    }

    #[test]
    fn trivial_profiles() {
        let t = BinaryTree::new();
        assert_eq!(t.profile().count(0), 1);
        assert_eq!(t.extremal_depths(), (0, 0));

        // Perfectly balanced 4-leaf tree.
        let t = BinaryTree::from_leaves(vec![w("00"), w("01"), w("10"), w("11")]).unwrap();
        assert_eq!(t.extremal_depths(), (2, 2));
    }

    #[test]
    fn subtree_counts() {
        let t = BinaryTree::new();
        assert_eq!(t.subtree_leaf_counts()[&NodeWord::ROOT], 1);

        // n = 2 tree split at root then 0: counts {e:3, 0:2, 1:1, 00:1, 01:1}.
        let mut t = BinaryTree::new();
        t.split_leaf(NodeWord::ROOT).unwrap();
        t.split_leaf(w("0")).unwrap();
        let c = t.subtree_leaf_counts();
        assert_eq!(c[&NodeWord::ROOT], 3);
        assert_eq!(c[&w("0")], 2);
        assert_eq!(c[&w("1")], 1);
        assert_eq!(c[&w("00")], 1);
        assert_eq!(c[&w("01")], 1);
        // Internal-node additivity and total leaf count.
        assert_eq!(c[&w("0")] + c[&w("1")], c[&NodeWord::ROOT]);
        let leaf_sum: u64 = t.leaves().iter().map(|&u| c[&u]).sum();
        assert_eq!(leaf_sum, t.leaf_count() as u64);
    }

    #[test]
    fn epl_consistency() {
        let mut t = BinaryTree::new();
        for _ in 0..6 {
            t.split_leaf_at(0);
        }
        assert_eq!(t.external_path_length(), t.profile().external_path_length());
    }

    #[test]
    fn preorder_roundtrip() {
        let mut t = BinaryTree::new();
        assert_eq!(t.preorder_bits(), "0");
        t.split_leaf(NodeWord::ROOT).unwrap();
        t.split_leaf(w("1")).unwrap();
        // root internal, left leaf, right internal with two leaves
        assert_eq!(t.preorder_bits(), "10100");
        let back = BinaryTree::from_preorder_bits("10100").unwrap();
        assert_eq!(back.leaf_set(), t.leaf_set());
        assert!(BinaryTree::from_preorder_bits("11").is_none());
        assert!(BinaryTree::from_preorder_bits("00").is_none());
    }

    #[test]
    fn from_leaves_rejects_non_trees() {
        assert!(BinaryTree::from_leaves(vec![]).is_none());
        assert!(BinaryTree::from_leaves(vec![w("0")]).is_none());
        assert!(BinaryTree::from_leaves(vec![w("0"), w("1"), w("10")]).is_none());
        assert!(BinaryTree::from_leaves(vec![w("0"), w("10"), w("11")]).is_some());
    }
}
