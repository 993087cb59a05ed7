//! Closed-form evaluators for the profile martingale families and their
//! critical constants.
//!
//! For a tree with leaf profile `U_k` after `n` insertions, the discrete
//! family is `M_n(z) = sum_k U_k z^k / C_n(z)` with normalising product
//! `C_n(z) = prod_{k<n} (k + 2z)/(k + 1)`; the continuous-time family is
//! `M(t, z) = sum_k U_k z^k e^{t(1-2z)}`. Observing the continuous family
//! at the n-th jump time factors it exactly as
//! `M(tau_n, z) = e^{tau_n (1-2z)} C_n(z) * M_n(z)`, which is the identity
//! the verification suite checks to ten digits on simulated paths.
//!
//! Extremal leaf depths grow like `c' ln n` and `c ln n` where `c' < 2 < c`
//! solve `eta_2(x) = 1` and `eta_lambda` is the Poisson large-deviation
//! rate; the martingale limit degenerates outside `[c'/2, c/2]`.

#[allow(unused_imports)]
use num_traits::Float;

use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::special;
use crate::tree::{BinaryTree, Profile};

pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MartingaleError {
    /// `z` hit the forbidden set `{0, -1/2, -1, -3/2, ...}` where the
    /// normalising product vanishes.
    ForbiddenParameter,
}

impl fmt::Display for MartingaleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MartingaleError::ForbiddenParameter => {
                f.write_str("z is a non-positive half-integer")
            }
        }
    }
}

impl core::error::Error for MartingaleError {}

/// Poisson large-deviation rate `eta_lambda(x) = x ln(x/lambda) - x + lambda`,
/// extended by continuity to `eta_lambda(0) = lambda`.
pub fn eta(lambda: f64, x: f64) -> f64 {
    debug_assert!(lambda > 0.0 && x >= 0.0);
    if x == 0.0 {
        lambda
    } else {
        x * (x / lambda).ln() - x + lambda
    }
}

/// The constants governing extremal depth growth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalConstants {
    /// Lower solution of `eta_2(x) = 1` (saturation-level constant).
    pub c_prime: f64,
    /// Upper solution of `eta_2(x) = 1` (height constant).
    pub c: f64,
    /// `c' / 2`, lower critical martingale parameter.
    pub z_minus: f64,
    /// `c / 2`, upper critical martingale parameter.
    pub z_plus: f64,
}

/// Solves `eta_2(x) = 1` on both sides of the minimum at `x = 2` by
/// bisection to the requested tolerance. Brackets are guaranteed:
/// `eta_2(0) = 2 > 1`, `eta_2(2) = 0 < 1` and `eta_2` grows without bound.
pub fn critical_constants(tol: f64) -> CriticalConstants {
    debug_assert!(tol > 0.0);
    let f = |x: f64| eta(2.0, x) - 1.0;
    let c_prime = bisect(f, 1e-12, 2.0, tol);
    let c = bisect(f, 2.0, 16.0, tol);
    CriticalConstants {
        c_prime,
        c,
        z_minus: c_prime / 2.0,
        z_plus: c / 2.0,
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    debug_assert!(flo * f(hi) <= 0.0, "root not bracketed");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn is_forbidden_real(z: f64) -> bool {
    z <= 0.0 && (2.0 * z).fract() == 0.0
}

/// Normalising product `C_n(z)` for real `z`, `z` not a non-positive
/// half-integer. Positive `z` goes through log-gamma; other values fall
/// back to the explicit product.
pub fn c_n(z: f64, n: u64) -> Result<f64, MartingaleError> {
    if is_forbidden_real(z) {
        return Err(MartingaleError::ForbiddenParameter);
    }
    if z > 0.0 {
        let nf = n as f64;
        Ok((special::ln_gamma(nf + 2.0 * z) - special::ln_gamma(2.0 * z)
            - special::ln_gamma(nf + 1.0))
        .exp())
    } else {
        let mut prod = 1.0;
        for k in 0..n {
            prod *= (k as f64 + 2.0 * z) / (k as f64 + 1.0);
        }
        Ok(prod)
    }
}

/// `ln C_n(z)` for positive real `z` (no overflow at any feasible `n`).
pub fn ln_c_n(z: f64, n: u64) -> f64 {
    debug_assert!(z > 0.0);
    let nf = n as f64;
    special::ln_gamma(nf + 2.0 * z) - special::ln_gamma(2.0 * z) - special::ln_gamma(nf + 1.0)
}

fn is_forbidden_complex(z: Complex64) -> bool {
    z.im == 0.0 && is_forbidden_real(z.re)
}

/// `C_n(z)` for complex `z` off the forbidden set.
pub fn c_n_complex(z: Complex64, n: u64) -> Result<Complex64, MartingaleError> {
    if is_forbidden_complex(z) {
        return Err(MartingaleError::ForbiddenParameter);
    }
    // The explicit product is exact enough and cheap at the sizes complex
    // evaluations are used for; large n with Re z > 0 goes through the
    // complex log-gamma.
    if n <= 4096 || z.re <= 0.0 {
        let mut prod = Complex64::ONE;
        for k in 0..n {
            prod *= (z * 2.0 + k as f64) / (k as f64 + 1.0);
        }
        Ok(prod)
    } else {
        let nf = Complex64::new(n as f64, 0.0);
        let two_z = z * 2.0;
        Ok((special::ln_gamma_complex(nf + two_z)
            - special::ln_gamma_complex(two_z)
            - special::ln_gamma_complex(nf + Complex64::ONE))
        .exp())
    }
}

/// Exact `C_n(z)` for rational `z` off the forbidden set.
pub fn c_n_rational(z: &Rational, n: u64) -> Result<Rational, MartingaleError> {
    let mut prod = Rational::one();
    for k in 0..n {
        let num = Rational::from(BigInt::from(k)) + z * Rational::from(BigInt::from(2));
        if num.is_zero() {
            return Err(MartingaleError::ForbiddenParameter);
        }
        prod *= num / Rational::from(BigInt::from(k + 1));
    }
    Ok(prod)
}

/// First-order estimate `C_n(z) ~ n^(2z-1) / Gamma(2z)`.
pub fn c_n_asymptotic(z: Complex64, n: u64) -> Result<Complex64, MartingaleError> {
    if is_forbidden_complex(z) {
        return Err(MartingaleError::ForbiddenParameter);
    }
    let nf = Complex64::new(n as f64, 0.0);
    let exponent = z * 2.0 - Complex64::ONE;
    Ok((exponent * nf.ln() - special::ln_gamma_complex(z * 2.0)).exp())
}

/// `sum_k U_k z^k` over a profile, real `z`.
pub fn profile_polynomial(profile: &Profile, z: f64) -> f64 {
    profile.iter().map(|(k, c)| c as f64 * z.powi(k as i32)).sum()
}

/// `sum_k k U_k z^(k-1)` over a profile (derivative of the polynomial).
pub fn profile_polynomial_deriv(profile: &Profile, z: f64) -> f64 {
    profile
        .iter()
        .map(|(k, c)| {
            if k == 0 {
                0.0
            } else {
                c as f64 * k as f64 * z.powi(k as i32 - 1)
            }
        })
        .sum()
}

/// Discrete profile martingale `M_n(z)` evaluated from a profile with
/// `n + 1` leaves; `z > 0`.
pub fn bst_martingale(profile: &Profile, z: f64) -> Result<f64, MartingaleError> {
    if is_forbidden_real(z) || z <= 0.0 {
        return Err(MartingaleError::ForbiddenParameter);
    }
    let n = profile.leaf_count() - 1;
    // Evaluate in log space against ln C_n to stay stable at large n.
    Ok(profile_polynomial(profile, z) * (-ln_c_n(z, n)).exp())
}

/// `M_n(z)` at complex `z`.
pub fn bst_martingale_complex(profile: &Profile, z: Complex64) -> Result<Complex64, MartingaleError> {
    let n = profile.leaf_count() - 1;
    let c = c_n_complex(z, n)?;
    let s: Complex64 = profile
        .iter()
        .map(|(k, cnt)| z.powi(k as i32) * cnt as f64)
        .sum();
    Ok(s / c)
}

/// Exact `M_n(z)` at rational `z`.
pub fn bst_martingale_rational(
    profile: &Profile,
    z: &Rational,
) -> Result<Rational, MartingaleError> {
    let n = profile.leaf_count() - 1;
    let c = c_n_rational(z, n)?;
    let mut s = Rational::zero();
    for (k, cnt) in profile.iter() {
        s += rat_pow(z, k) * Rational::from(BigInt::from(cnt));
    }
    Ok(s / c)
}

fn rat_pow(z: &Rational, k: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc *= z;
    }
    acc
}

/// Continuous-time profile martingale `M(t, z) = sum_u z^|u| e^(t(1-2z))`.
pub fn yule_martingale(profile: &Profile, t: f64, z: f64) -> f64 {
    profile_polynomial(profile, z) * (t * (1.0 - 2.0 * z)).exp()
}

pub fn yule_martingale_complex(profile: &Profile, t: f64, z: Complex64) -> Complex64 {
    let s: Complex64 = profile
        .iter()
        .map(|(k, cnt)| z.powi(k as i32) * cnt as f64)
        .sum();
    s * ((Complex64::ONE - z * 2.0) * t).exp()
}

/// Time component of the jump-time factorisation:
/// `e^(tau_n (1-2z)) C_n(z)`, mean one in `n` for each fixed `z`.
pub fn time_component(n: u64, tau_n: f64, z: f64) -> Result<f64, MartingaleError> {
    if z > 0.0 {
        Ok((tau_n * (1.0 - 2.0 * z) + ln_c_n(z, n)).exp())
    } else {
        Ok((tau_n * (1.0 - 2.0 * z)).exp() * c_n(z, n)?)
    }
}

/// `C'_n(z) / C_n(z) = sum_{j<n} 2/(j+2z)`, via digamma.
pub fn c_n_log_deriv(z: f64, n: u64) -> f64 {
    debug_assert!(z > 0.0);
    2.0 * (special::digamma(n as f64 + 2.0 * z) - special::digamma(2.0 * z))
}

/// Derivative `M'_n(z)` of the discrete martingale in `z`, for `z > 0`:
/// `[sum_u |u| z^(|u|-1)]/C_n(z) - (C'_n/C_n)(z) M_n(z)`.
pub fn bst_derivative_martingale(profile: &Profile, z: f64) -> Result<f64, MartingaleError> {
    if z <= 0.0 {
        return Err(MartingaleError::ForbiddenParameter);
    }
    let n = profile.leaf_count() - 1;
    let inv_c = (-ln_c_n(z, n)).exp();
    let m = profile_polynomial(profile, z) * inv_c;
    Ok(profile_polynomial_deriv(profile, z) * inv_c - c_n_log_deriv(z, n) * m)
}

/// Exact `M'_n(z)` at rational `z > 0`.
pub fn bst_derivative_martingale_rational(
    profile: &Profile,
    z: &Rational,
) -> Result<Rational, MartingaleError> {
    if z <= &Rational::zero() {
        return Err(MartingaleError::ForbiddenParameter);
    }
    let n = profile.leaf_count() - 1;
    let c = c_n_rational(z, n)?;
    let mut s = Rational::zero();
    let mut s_deriv = Rational::zero();
    for (k, cnt) in profile.iter() {
        let cnt = Rational::from(BigInt::from(cnt));
        s += rat_pow(z, k) * &cnt;
        if k > 0 {
            s_deriv += rat_pow(z, k - 1) * Rational::from(BigInt::from(k)) * &cnt;
        }
    }
    let mut log_deriv = Rational::zero();
    for j in 0..n {
        log_deriv += Rational::from(BigInt::from(2))
            / (Rational::from(BigInt::from(j)) + z * Rational::from(BigInt::from(2)));
    }
    Ok(&s_deriv / &c - log_deriv * s / c)
}

/// Derivative `M'(t, z)` of the continuous-time martingale in `z`:
/// `sum_u (|u|/z - 2t) z^|u| e^(t(1-2z))`.
pub fn yule_derivative_martingale(profile: &Profile, t: f64, z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let w = (t * (1.0 - 2.0 * z)).exp();
    profile
        .iter()
        .map(|(k, c)| c as f64 * (k as f64 / z - 2.0 * t) * z.powi(k as i32))
        .sum::<f64>()
        * w
}

/// Moment-region indicator `f(z, q) = 1 + q(2 Re z - 1) - 2 |z|^q` for
/// `1 < q <= 2`; the q-th moments of `M(t, z)` stay bounded exactly when
/// `f(z, q) > 0`.
pub fn lq_region(z: Complex64, q: f64) -> f64 {
    debug_assert!(q > 1.0 && q <= 2.0);
    1.0 + q * (2.0 * z.re - 1.0) - 2.0 * z.norm().powf(q)
}

/// Factor linking the limits of the two families:
/// `xi^(2z-1) / Gamma(2z)` for `xi, z > 0`.
pub fn limit_connection_factor(xi: f64, z: f64) -> f64 {
    debug_assert!(xi > 0.0 && z > 0.0);
    ((2.0 * z - 1.0) * xi.ln() - special::ln_gamma(2.0 * z)).exp()
}

/// One application of the subtree splitting recursion:
/// `z (u^(2z-1) m0 + (1-u)^(2z-1) m1)`.
pub fn splitting_map(m0: f64, m1: f64, u: f64, z: f64) -> f64 {
    debug_assert!(u > 0.0 && u < 1.0);
    z * (u.powf(2.0 * z - 1.0) * m0 + (1.0 - u).powf(2.0 * z - 1.0) * m1)
}

/// One application of the derivative splitting recursion:
/// `z u^(2z-1) m0' + z (1-u)^(2z-1) m1'
///  + 2z u^(2z-1) ln(u) m0 + 2z (1-u)^(2z-1) ln(1-u) m1 + m/z`.
///
/// At `z = 1` with `m0 = m1 = m = 1` this is the additive fixed-point map
/// with kernel `2u ln u + 2(1-u) ln(1-u) + 1`.
#[allow(clippy::too_many_arguments)]
pub fn derivative_splitting_map(
    m0_deriv: f64,
    m1_deriv: f64,
    m0: f64,
    m1: f64,
    m: f64,
    u: f64,
    z: f64,
) -> f64 {
    debug_assert!(u > 0.0 && u < 1.0 && z > 0.0);
    let a = u.powf(2.0 * z - 1.0);
    let b = (1.0 - u).powf(2.0 * z - 1.0);
    z * a * m0_deriv + z * b * m1_deriv
        + 2.0 * z * a * u.ln() * m0
        + 2.0 * z * b * (1.0 - u).ln() * m1
        + m / z
}

/// `M'_n(1)` from external path length: `EPL/(n+1) - 2 (H_{n+1} - 1)`.
/// This is the per-tree value whose limit satisfies the additive
/// fixed-point equation.
pub fn depth_derivative_at_one(epl: u64, n: u64) -> f64 {
    epl as f64 / (n as f64 + 1.0) - 2.0 * (special::harmonic(n + 1) - 1.0)
}

/// [`depth_derivative_at_one`] computed from a tree.
pub fn quicksort_functional(tree: &BinaryTree) -> f64 {
    depth_derivative_at_one(tree.external_path_length(), tree.internal_count() as u64)
}

/// Exact-rational `M'_n(1)`.
pub fn quicksort_functional_rational(profile: &Profile) -> Rational {
    let n = profile.leaf_count() as i64 - 1;
    let epl = Rational::from(BigInt::from(profile.external_path_length()));
    let mut harmonic = Rational::zero();
    for m in 1..=(n + 1) {
        harmonic += Rational::new(BigInt::one(), BigInt::from(m));
    }
    epl / Rational::from(BigInt::from(n + 1))
        - Rational::from(BigInt::from(2)) * (harmonic - Rational::one())
}
