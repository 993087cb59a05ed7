//! Exact, independently derived ground truth.
//!
//! Everything in this module is computed by a route that does not share
//! code with the simulators or the closed-form evaluators it is used to
//! check: big-integer level-count expectations, brute-force shape
//! distributions for small trees (by two different algorithms), exact
//! insertion- and spine-depth laws by Bernoulli convolution, and fixed-point
//! moments by quadrature.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::special;
use crate::tree::BinaryTree;

/// Exact rational scalar used by the oracles.
pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactError {
    /// Index outside the tabulated range.
    OutOfRange,
    /// Exhaustive enumeration requested beyond its size cap.
    TooLarge,
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::OutOfRange => f.write_str("index out of tabulated range"),
            ExactError::TooLarge => f.write_str("enumeration size cap exceeded"),
        }
    }
}

impl core::error::Error for ExactError {}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Unsigned Stirling numbers of the first kind, tabulated by the recurrence
/// `c(n+1, k) = c(n, k-1) + n c(n, k)`.
pub struct StirlingTable {
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    pub fn build(n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
        rows.push(alloc::vec![BigUint::one()]);
        for n in 0..n_max {
            let prev = &rows[n];
            let mut row = alloc::vec![BigUint::ZERO; n + 2];
            for k in 0..=n {
                let carry = &prev[k] * BigUint::from(n);
                row[k] += carry;
                row[k + 1] += &prev[k];
            }
            rows.push(row);
        }
        StirlingTable { rows }
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `c(n, k)` for `0 <= k <= n <= n_max`.
    pub fn value(&self, n: usize, k: usize) -> Result<&BigUint, ExactError> {
        if n > self.n_max() || k > n {
            return Err(ExactError::OutOfRange);
        }
        Ok(&self.rows[n][k])
    }

    /// Checks `sum_k 2^k c(n, k) == (n+1)!` for the given row, which is the
    /// level-count total identity in disguise.
    pub fn weighted_row_identity_holds(&self, n: usize) -> bool {
        let Some(row) = self.rows.get(n) else {
            return false;
        };
        let mut sum = BigUint::ZERO;
        for (k, c) in row.iter().enumerate() {
            sum += c << k;
        }
        let mut fact = BigUint::one();
        for j in 2..=(n as u64 + 1) {
            fact *= BigUint::from(j);
        }
        sum == fact
    }
}

/// Exact expected level counts after `n` insertions:
/// `E U_k(n) = 2^k c(n, k) / n!`, returned as a dense vector indexed by `k`.
pub fn expected_profile_exact(table: &StirlingTable, n: usize) -> Result<Vec<Rational>, ExactError> {
    if n > table.n_max() {
        return Err(ExactError::OutOfRange);
    }
    let mut fact = BigInt::one();
    for j in 2..=(n as u64) {
        fact *= BigInt::from(j);
    }
    Ok((0..=n)
        .map(|k| {
            let num = BigInt::from(table.rows[n][k].clone()) << k;
            Rational::new(num, fact.clone())
        })
        .collect())
}

/// Expected level counts by the one-step linear recurrence
/// `E U_k(n+1) = E U_k(n) + (2 E U_{k-1}(n) - E U_k(n)) / (n+1)`,
/// in `f64`, dense up to `k_max`.
///
/// The recurrence follows from the uniform-leaf transition: the step splits
/// a depth-`(k-1)` leaf with probability `U_{k-1}(n)/(n+1)`, removing it and
/// adding two leaves at depth `k`.
pub fn expected_profile_recurrence(n: usize, k_max: usize) -> Vec<f64> {
    let mut eu = alloc::vec![0.0f64; k_max + 1];
    eu[0] = 1.0;
    let mut prev = alloc::vec![0.0f64; k_max + 1];
    for m in 0..n {
        prev.copy_from_slice(&eu);
        let inv = 1.0 / (m as f64 + 1.0);
        eu[0] -= prev[0] * inv;
        for k in 1..=k_max {
            eu[k] += (2.0 * prev[k - 1] - prev[k]) * inv;
        }
    }
    eu
}

/// A depth budget comfortably past the height of typical trees of size `n`
/// (the height constant is about 4.32 per unit of `ln n`).
pub fn profile_depth_budget(n: usize) -> usize {
    (5.5 * (n.max(2) as f64).ln()).ceil() as usize + 16
}

/// The two closed-form estimates for `E U_k(n)`:
/// `form1 = (2 ln n)^k / (k! n Gamma(r))` and
/// `form2 = n^(1 - eta_2(r)) / (Gamma(r) sqrt(2 pi k))`, `r = k / ln n`.
/// Both are evaluated in log space.
pub fn hwang_estimate(n: u64, k: u64) -> (f64, f64) {
    debug_assert!(k >= 1 && n >= 2);
    let ln_n = (n as f64).ln();
    let kf = k as f64;
    let r = kf / ln_n;
    let ln_gamma_r = special::ln_gamma(r);
    let form1 = (kf * (2.0 * ln_n).ln() - special::ln_gamma(kf + 1.0) - ln_n - ln_gamma_r).exp();
    let eta = crate::martingale::eta(2.0, r);
    let form2 =
        ((1.0 - eta) * ln_n - ln_gamma_r - 0.5 * (2.0 * core::f64::consts::PI * kf).ln()).exp();
    (form1, form2)
}

/// Exact distribution of tree shapes, keyed by preorder bit string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeDistribution {
    probs: BTreeMap<String, Rational>,
}

impl ShapeDistribution {
    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probability(&self, shape_key: &str) -> Rational {
        self.probs.get(shape_key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_mass(&self) -> Rational {
        self.probs.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.probs.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Probabilities in the order of the given shapes (for chi-square cells).
    pub fn cell_probs_f64(&self, shapes: &[BinaryTree]) -> Vec<f64> {
        shapes
            .iter()
            .map(|t| self.probability(&t.preorder_bits()).to_f64().unwrap_or(0.0))
            .collect()
    }
}

/// Cap on exhaustive shape work: Catalan growth makes larger sizes useless
/// for desk checks.
pub const MAX_ENUMERATION: usize = 8;

/// All tree shapes with exactly `n` internal nodes.
pub fn enumerate_shapes(n: usize) -> Result<Vec<BinaryTree>, ExactError> {
    if n > MAX_ENUMERATION {
        return Err(ExactError::TooLarge);
    }
    fn go(n: usize) -> Vec<Vec<crate::word::NodeWord>> {
        if n == 0 {
            return alloc::vec![alloc::vec![crate::word::NodeWord::ROOT]];
        }
        let mut out = Vec::new();
        for left in 0..n {
            let right = n - 1 - left;
            for l in go(left) {
                for r in go(right) {
                    let mut leaves = Vec::with_capacity(l.len() + r.len());
                    leaves.extend(l.iter().map(|w| w.prepend(0)));
                    leaves.extend(r.iter().map(|w| w.prepend(1)));
                    out.push(leaves);
                }
            }
        }
        out
    }
    Ok(go(n)
        .into_iter()
        .map(|leaves| BinaryTree::from_leaves(leaves).expect("enumerated shape is a tree"))
        .collect())
}

/// Shape distribution by dynamic programming over the insertion chain:
/// histories merge by shape at every step, each step splitting every leaf
/// with probability `1/(m+1)`.
pub fn shape_distribution_chain_dp(n: usize) -> Result<ShapeDistribution, ExactError> {
    if n > MAX_ENUMERATION {
        return Err(ExactError::TooLarge);
    }
    let mut states: BTreeMap<String, (BinaryTree, Rational)> = BTreeMap::new();
    let root = BinaryTree::new();
    states.insert(root.preorder_bits(), (root, Rational::one()));
    for m in 0..n {
        let mut next: BTreeMap<String, (BinaryTree, Rational)> = BTreeMap::new();
        let step = rational(1, m as i64 + 1);
        for (tree, prob) in states.into_values() {
            let contribution = prob * &step;
            for i in 0..tree.leaf_count() {
                let mut t = tree.clone();
                t.split_leaf_at(i);
                let key = t.preorder_bits();
                match next.get_mut(&key) {
                    Some((_, p)) => *p += &contribution,
                    None => {
                        next.insert(key, (t, contribution.clone()));
                    }
                }
            }
        }
        states = next;
    }
    Ok(ShapeDistribution {
        probs: states.into_iter().map(|(k, (_, p))| (k, p)).collect(),
    })
}

/// Shape distribution by the product formula: a shape with internal nodes
/// `v` has probability `prod_v 1 / (number of internal nodes in the subtree
/// rooted at v)`.
pub fn shape_distribution_product_formula(n: usize) -> Result<ShapeDistribution, ExactError> {
    let shapes = enumerate_shapes(n)?;
    let mut probs = BTreeMap::new();
    for t in shapes {
        let counts = t.subtree_leaf_counts();
        let mut p = Rational::one();
        for (&node, &leaf_count) in &counts {
            if !t.is_leaf(node) {
                // subtree with m leaves holds m-1 keys
                p /= Rational::from(BigInt::from(leaf_count as i64 - 1));
            }
        }
        probs.insert(t.preorder_bits(), p);
    }
    Ok(ShapeDistribution { probs })
}

/// Exact pmf of a depth of the form `1 + sum_{k=1}^{n-1} Be(w/(k+w))`
/// (independent summands), as a dense vector indexed by depth.
pub fn tilted_depth_pmf_rational(n: usize, weight: &Rational) -> Vec<Rational> {
    debug_assert!(n >= 1);
    let mut pmf = alloc::vec![Rational::zero(); n.max(1) + 1];
    pmf[1] = Rational::one();
    for k in 1..n {
        let p = weight / (weight + Rational::from(BigInt::from(k as i64)));
        let q = Rational::one() - &p;
        for j in (1..=k + 1).rev() {
            let stay = &pmf[j] * &q;
            let up = &pmf[j - 1] * &p;
            pmf[j] = stay + up;
        }
        pmf[0] = &pmf[0] * &q;
    }
    pmf
}

/// Float version of [`tilted_depth_pmf_rational`], truncated at `k_max`.
/// The truncated mass is far below any tolerance used here as long as
/// `k_max` is a few times `weight * ln n`.
pub fn tilted_depth_pmf(n: usize, weight: f64, k_max: usize) -> Vec<f64> {
    let mut pmf = alloc::vec![0.0f64; k_max + 1];
    pmf[1] = 1.0;
    for k in 1..n {
        let p = weight / (k as f64 + weight);
        let q = 1.0 - p;
        for j in (1..=k_max).rev() {
            pmf[j] = pmf[j] * q + pmf[j - 1] * p;
        }
        pmf[0] *= q;
    }
    pmf
}

/// Exact pmf of the insertion depth after `n` insertions
/// (`1 + sum Be(2/(k+2))`).
pub fn insertion_depth_pmf(n: usize) -> Vec<Rational> {
    tilted_depth_pmf_rational(n, &rational(2, 1))
}

/// Exact spine depth pmf under tilt `2z` (`1 + sum Be(2z/(k+2z))`).
pub fn spine_depth_pmf_rational(n: usize, two_z: &Rational) -> Vec<Rational> {
    tilted_depth_pmf_rational(n, two_z)
}

/// Float spine depth pmf under tilt `2z`.
pub fn spine_depth_pmf(n: usize, two_z: f64, k_max: usize) -> Vec<f64> {
    tilted_depth_pmf(n, two_z, k_max)
}

/// Draws one sample of `1 + sum_{k=1}^{n-1} Be(w/(k+w))` in
/// `O(w ln n log n)` time by jumping between success indices.
///
/// Given the last success at index `k`, the chance that no success occurs
/// in `(k, m]` telescopes to
/// `G(m)/G(k)` with `ln G(x) = ln Gamma(x+1) - ln Gamma(x+1+w)`, which is
/// strictly decreasing in `m`; inverting a uniform draw against it by
/// binary search yields the next success index. This makes Bernoulli-sum
/// depth laws affordable at `n = 10^6` and beyond.
pub fn sample_tilted_depth<R: rand::Rng + ?Sized>(n: usize, weight: f64, rng: &mut R) -> u32 {
    debug_assert!(weight > 0.0);
    if n == 0 {
        return 0;
    }
    let ln_g = |x: f64| special::ln_gamma(x + 1.0) - special::ln_gamma(x + 1.0 + weight);
    let mut depth = 1u32;
    let mut k = 0usize; // last success index; epsilon_k range is 1..=n-1
    let last = n - 1;
    while k < last {
        let u: f64 = rng.random();
        if u <= 0.0 {
            break;
        }
        let target = ln_g(k as f64) + u.ln(); // next success at smallest m with ln G(m) < target
        if ln_g(last as f64) >= target {
            break; // survives past the horizon: no more successes
        }
        let mut lo = k; // ln_g(lo) >= target
        let mut hi = last; // ln_g(hi) < target
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ln_g(mid as f64) < target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        depth += 1;
        k = hi;
    }
    depth
}

/// Mean and standard deviation of `1 + sum_{k=1}^{n-1} Be(w/(k+w))`.
pub fn tilted_depth_moments(n: usize, weight: f64) -> (f64, f64) {
    let mut mean = 1.0;
    let mut var = 0.0;
    for k in 1..n {
        let p = weight / (k as f64 + weight);
        mean += p;
        var += p * (1.0 - p);
    }
    (mean, var.sqrt())
}

/// Exact mean and standard deviation of the insertion depth `d_n`.
pub fn insertion_depth_moments(n: usize) -> (f64, f64) {
    tilted_depth_moments(n, 2.0)
}

/// Coefficients, in the depth variable, of the insertion-depth generating
/// polynomial after `n` insertions: exact expansion of
/// `prod_{k=0}^{n-1} (k + 2z)/(k+1)` divided by `n+1`, indexed by the power
/// of `z`.
pub fn depth_generating_coefficients(n: usize) -> Vec<Rational> {
    // poly in z; multiply (k + 2z) then divide by (k+1)
    let mut coeffs = alloc::vec![Rational::one()];
    for k in 0..n {
        let mut next = alloc::vec![Rational::zero(); coeffs.len() + 1];
        let kf = Rational::from(BigInt::from(k as i64));
        let two = rational(2, 1);
        for (j, c) in coeffs.iter().enumerate() {
            next[j] += c * &kf;
            next[j + 1] += c * &two;
        }
        let div = rational(k as i64 + 1, 1);
        for c in &mut next {
            *c /= &div;
        }
        coeffs = next;
    }
    let norm = rational(n as i64 + 1, 1);
    for c in &mut coeffs {
        *c /= &norm;
    }
    coeffs
}

/// The additive-cost kernel of the depth-derivative fixed point:
/// `g(u) = 2u ln u + 2(1-u) ln(1-u) + 1`, with the `0 ln 0 = 0` limit.
pub fn quicksort_kernel(u: f64) -> f64 {
    let a = if u > 0.0 { 2.0 * u * u.ln() } else { 0.0 };
    let b = if u < 1.0 { 2.0 * (1.0 - u) * (1.0 - u).ln() } else { 0.0 };
    a + b + 1.0
}

/// Mean (identically 0) and second moment of the limit of the
/// depth-derivative functional at its fixed point: the second moment is
/// `3 * int_0^1 g(u)^2 du`, evaluated by adaptive quadrature.
pub fn quicksort_moments() -> (f64, f64) {
    let second = 3.0
        * special::integrate_adaptive_simpson(&|u| quicksort_kernel(u).powi(2), 0.0, 1.0, 1e-10);
    (0.0, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::NodeWord;
    use rand::Rng;

    #[test]
    fn stirling_small_values() {
        let t = StirlingTable::build(8);
        assert_eq!(t.value(0, 0).unwrap(), &BigUint::one());
        assert_eq!(t.value(2, 1).unwrap(), &BigUint::from(1u8));
        assert_eq!(t.value(2, 2).unwrap(), &BigUint::from(1u8));
        // c(3,2) = c(2,1) + 2 c(2,2) = 3
        assert_eq!(t.value(3, 2).unwrap(), &BigUint::from(3u8));
        assert_eq!(t.value(4, 1).unwrap(), &BigUint::from(6u8)); // (n-1)!
        assert!(t.value(9, 0).is_err());
        assert!(t.value(3, 4).is_err());
    }

    #[test]
    fn stirling_weighted_identity() {
        let t = StirlingTable::build(40);
        for n in 0..=40 {
            assert!(t.weighted_row_identity_holds(n), "row {n}");
        }
        // explicit instance: sum 2^k c(5,k) = 720 = 6!
        let row_sum: BigUint = (0..=5u32)
            .map(|k| t.value(5, k as usize).unwrap() << k)
            .sum();
        assert_eq!(row_sum, BigUint::from(720u32));
    }

    #[test]
    fn exact_profile_small_n() {
        let t = StirlingTable::build(8);
        let p2 = expected_profile_exact(&t, 2).unwrap();
        assert_eq!(p2[1], rational(1, 1));
        assert_eq!(p2[2], rational(2, 1));
        let p3 = expected_profile_exact(&t, 3).unwrap();
        assert_eq!(p3[1], rational(2, 3));
        assert_eq!(p3[2], rational(2, 1));
        assert_eq!(p3[3], rational(4, 3));
        for n in 0..=8 {
            let p = expected_profile_exact(&t, n).unwrap();
            let total: Rational = p.iter().sum();
            assert_eq!(total, rational(n as i64 + 1, 1), "n={n}");
        }
    }

    #[test]
    fn recurrence_matches_exact() {
        let t = StirlingTable::build(30);
        for n in [3usize, 10, 30] {
            let exact = expected_profile_exact(&t, n).unwrap();
            let rec = expected_profile_recurrence(n, n);
            for k in 0..=n {
                let e = exact[k].to_f64().unwrap();
                assert!(
                    (rec[k] - e).abs() <= 1e-12 * e.max(1.0),
                    "n={n} k={k}: {} vs {e}",
                    rec[k]
                );
            }
        }
    }

    #[test]
    fn recurrence_conserves_total() {
        let n = 2_000;
        let rec = expected_profile_recurrence(n, profile_depth_budget(n));
        let total: f64 = rec.iter().sum();
        assert!((total - (n as f64 + 1.0)).abs() < 1e-6 * n as f64);
    }

    #[test]
    fn recurrence_peaks_near_twice_log_n() {
        let n = 100_000;
        let rec = expected_profile_recurrence(n, profile_depth_budget(n));
        let argmax = rec
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0 as f64;
        let center = 2.0 * (n as f64).ln();
        assert!((argmax - center).abs() <= 3.0, "peak {argmax} vs {center}");
    }

    #[test]
    fn shape_distributions_agree() {
        for n in 0..=6 {
            let a = shape_distribution_chain_dp(n).unwrap();
            let b = shape_distribution_product_formula(n).unwrap();
            assert_eq!(a, b, "n={n}");
            assert_eq!(a.total_mass(), Rational::one());
        }
        assert!(shape_distribution_chain_dp(9).is_err());
    }

    #[test]
    fn shape_distribution_known_values() {
        // n=2: both shapes probability 1/2.
        let d = shape_distribution_chain_dp(2).unwrap();
        assert_eq!(d.support_size(), 2);
        for (_, p) in d.iter() {
            assert_eq!(p, &rational(1, 2));
        }
        // n=3: 5 shapes; balanced 1/3, the 4 combs 1/6 each.
        let d = shape_distribution_chain_dp(3).unwrap();
        assert_eq!(d.support_size(), 5);
        let balanced = BinaryTree::from_leaves(alloc::vec![
            NodeWord::parse("00").unwrap(),
            NodeWord::parse("01").unwrap(),
            NodeWord::parse("10").unwrap(),
            NodeWord::parse("11").unwrap(),
        ])
        .unwrap();
        assert_eq!(d.probability(&balanced.preorder_bits()), rational(1, 3));
        let mass: Rational = d.iter().map(|(_, p)| p.clone()).sum();
        assert_eq!(mass, Rational::one());
    }

    #[test]
    fn catalan_support_sizes() {
        let sizes = [1usize, 1, 2, 5, 14, 42];
        for (n, &expect) in sizes.iter().enumerate() {
            assert_eq!(enumerate_shapes(n).unwrap().len(), expect, "n={n}");
        }
    }

    #[test]
    fn exact_profile_matches_shape_average() {
        let t = StirlingTable::build(6);
        for n in 1..=6usize {
            let dist = shape_distribution_chain_dp(n).unwrap();
            let exact = expected_profile_exact(&t, n).unwrap();
            let mut avg = alloc::vec![Rational::zero(); n + 1];
            for (key, p) in dist.iter() {
                let tree = BinaryTree::from_preorder_bits(key).unwrap();
                for (k, c) in tree.profile().iter() {
                    avg[k as usize] += Rational::from(BigInt::from(c)) * p;
                }
            }
            assert_eq!(avg, exact, "n={n}");
        }
    }

    #[test]
    fn insertion_depth_small_n() {
        let pmf = insertion_depth_pmf(1);
        assert_eq!(pmf[1], Rational::one());
        let pmf = insertion_depth_pmf(2);
        assert_eq!(pmf[1], rational(1, 3));
        assert_eq!(pmf[2], rational(2, 3));
    }

    #[test]
    fn insertion_depth_matches_generating_polynomial() {
        for n in 1..=12 {
            let pmf = insertion_depth_pmf(n);
            let coeffs = depth_generating_coefficients(n);
            assert_eq!(pmf.len(), coeffs.len());
            assert_eq!(pmf, coeffs, "n={n}");
        }
    }

    #[test]
    fn insertion_depth_mean_cross_check() {
        let n = 40;
        let pmf = insertion_depth_pmf(n);
        let mean: Rational = pmf
            .iter()
            .enumerate()
            .map(|(k, p)| rational(k as i64, 1) * p)
            .sum();
        let direct: Rational = rational(1, 1)
            + (1..n as i64).map(|k| rational(2, k + 2)).sum::<Rational>();
        assert_eq!(mean, direct);
        let (mf, _) = insertion_depth_moments(n);
        assert!((mf - mean.to_f64().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn spine_depth_pmf_values() {
        // weight 1, n=3: mean = 1 + 1/2 + 1/3 = 11/6
        let pmf = spine_depth_pmf_rational(3, &rational(1, 1));
        let mean: Rational = pmf
            .iter()
            .enumerate()
            .map(|(k, p)| rational(k as i64, 1) * p)
            .sum();
        assert_eq!(mean, rational(11, 6));
        // n=1: point mass at 1 for any tilt
        let pmf = spine_depth_pmf_rational(1, &rational(7, 3));
        assert_eq!(pmf[1], Rational::one());
        // tilt 2z = 2 recovers the insertion depth law
        assert_eq!(spine_depth_pmf_rational(9, &rational(2, 1)), insertion_depth_pmf(9));
    }

    #[test]
    fn float_pmf_matches_rational() {
        let n = 60;
        let float = spine_depth_pmf(n, 3.0, 40);
        let exact = spine_depth_pmf_rational(n, &rational(3, 1));
        for (k, f) in float.iter().enumerate() {
            let e = exact.get(k).map(|p| p.to_f64().unwrap()).unwrap_or(0.0);
            assert!((f - e).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn hwang_forms_agree_for_large_k() {
        // form1/form2 -> 1 (Stirling's approximation of k!)
        let (f1, f2) = hwang_estimate(100_000_000, 50);
        assert!((f1 / f2 - 1.0).abs() < 0.01);
        // r = 1 simplification: Gamma(1) = 1
        let n = 1000u64;
        let k = ((n as f64).ln().round()) as u64;
        let (f1, _) = hwang_estimate(n, k);
        let ln_n = (n as f64).ln();
        let direct = ((k as f64) * (2.0 * ln_n).ln()
            - special::ln_gamma(k as f64 + 1.0)
            - ln_n
            - special::ln_gamma(k as f64 / ln_n))
        .exp();
        assert!((f1 / direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gap_sampler_matches_exact_pmf() {
        // the O(w ln n log n) sampler draws from the same law as the
        // Bernoulli convolution
        let n = 1_000usize;
        let w = 3.0;
        let k_max = 60;
        let pmf = spine_depth_pmf(n, w, k_max);
        let reps = 30_000usize;
        let mut counts = alloc::vec![0u64; k_max + 1];
        for rep in 0..reps {
            let mut rng = crate::streams::replicate_stream(91, rep as u64);
            let s = sample_tilted_depth(n, w, &mut rng) as usize;
            counts[s.min(k_max)] += 1;
        }
        let rep = crate::stats::chi_square(&counts, &pmf).unwrap();
        assert!(rep.passes(0.001), "p = {}", rep.p_value);
        // ... and agrees with naive Bernoulli sampling on a small case
        let mut naive_mean = 0.0;
        let mut gap_mean = 0.0;
        let m = 20_000;
        for rep in 0..m {
            let mut rng = crate::streams::replicate_stream(92, rep as u64);
            let mut s = 1u32;
            for k in 1..50usize {
                if rng.random::<f64>() < w / (k as f64 + w) {
                    s += 1;
                }
            }
            naive_mean += s as f64;
            let mut rng = crate::streams::replicate_stream(93, rep as u64);
            gap_mean += sample_tilted_depth(50, w, &mut rng) as f64;
        }
        let (mu, sd) = tilted_depth_moments(50, w);
        naive_mean /= m as f64;
        gap_mean /= m as f64;
        let tol = 4.0 * sd / (m as f64).sqrt();
        assert!((naive_mean - mu).abs() < tol);
        assert!((gap_mean - mu).abs() < tol);
    }

    #[test]
    fn quicksort_moment_quadrature() {
        let (mean, second) = quicksort_moments();
        assert_eq!(mean, 0.0);
        // closed form 7 - 2 pi^2 / 3, via symbolic integration
        let closed = 7.0 - 2.0 * core::f64::consts::PI.powi(2) / 3.0;
        assert!((second - closed).abs() < 1e-8, "{second} vs {closed}");
        // E g(U) = 0: consistency of the kernel with a centered fixed point
        let g_int = special::integrate_adaptive_simpson(&quicksort_kernel, 0.0, 1.0, 1e-10);
        assert!(g_int.abs() < 1e-8);
    }
}
