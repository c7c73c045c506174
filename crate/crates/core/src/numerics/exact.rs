//! Exact rational combinatorics.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::value::ratio_of;

/// `C(n, r)`, zero outside `0 <= r <= n`.
pub fn binomial(n: u64, r: i64) -> BigUint {
    if r < 0 || r as u64 > n {
        return BigUint::zero();
    }
    let r = (r as u64).min(n - r as u64);
    let mut acc = BigUint::one();
    for j in 0..r {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// Falling factorial `n (n-1) ... (n-m+1)`; zero when `m > n`, one when `m = 0`.
pub fn falling(n: u64, m: u64) -> BigUint {
    if m > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for j in 0..m {
        acc *= n - j;
    }
    acc
}

pub(crate) fn pow(base: u64, exp: u64) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

pub(crate) fn check_dims(n: u64, k: u64, alpha: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("N must be positive"));
    }
    if k > n {
        return Err(Error::domain(format!("prefix length k={k} exceeds N={n}")));
    }
    if alpha > k {
        return Err(Error::domain(format!("alpha={alpha} exceeds k={k}")));
    }
    Ok(())
}

pub(crate) fn check_index(n: u64, i: u64) -> Result<()> {
    if i > n {
        return Err(Error::domain(format!("index i={i} exceeds N={n}")));
    }
    Ok(())
}

/// Probability of a fixed prefix with `alpha` ones given `S_N = i`:
/// `C(N-k, i-alpha) / C(N, i)`.
pub fn a_i(n: u64, k: u64, alpha: u64, i: u64) -> Result<BigRational> {
    check_dims(n, k, alpha)?;
    check_index(n, i)?;
    if i < alpha || i - alpha > n - k {
        return Ok(BigRational::zero());
    }
    // Same value as C(N-k, i-alpha) / C(N, i) without N-sized binomials.
    Ok(ratio_of(a_numerator(n, k, alpha, i), falling(n, k)))
}

/// The iid kernel `(i/N)^alpha (1 - i/N)^(k-alpha)` with `0^0 = 1`.
pub fn b_i(n: u64, k: u64, alpha: u64, i: u64) -> Result<BigRational> {
    if n == 0 || alpha > k {
        return Err(Error::domain(format!("invalid (N={n}, k={k}, alpha={alpha})")));
    }
    check_index(n, i)?;
    Ok(ratio_of(b_numerator(n, k, alpha, i), pow(n, k)))
}

/// `i^alpha (N-i)^(k-alpha)`, the numerator of `b_i` over `N^k`.
pub(crate) fn b_numerator(n: u64, k: u64, alpha: u64, i: u64) -> BigUint {
    pow(i, alpha) * pow(n - i, k - alpha)
}

/// `(i)_alpha (N-i)_(k-alpha)`, the numerator of `a_i` over `(N)_k`.
///
/// Equal to `C(N-k, i-alpha) (N)_k / C(N, i)`, so it avoids big binomials in
/// bulk sums.
pub(crate) fn a_numerator(n: u64, k: u64, alpha: u64, i: u64) -> BigUint {
    falling(i, alpha) * falling(n - i, k - alpha)
}

/// `N^k / (N (N-1) ... (N-k+1))`.
pub fn r_constant(n: u64, k: u64) -> Result<BigRational> {
    if n == 0 || k > n {
        return Err(Error::domain(format!("r needs 0 <= k <= N, got k={k}, N={n}")));
    }
    Ok(ratio_of(pow(n, k), falling(n, k)))
}

/// `i! / ((i-alpha)! i^alpha)`; zero when `i < alpha`, one when `alpha <= 1`.
pub(crate) fn falling_factor(i: u64, alpha: u64) -> BigRational {
    if alpha == 0 {
        return BigRational::one();
    }
    if i == 0 {
        return BigRational::zero();
    }
    ratio_of(falling(i, alpha), pow(i, alpha))
}

/// `prod_{j=1}^{m-1} (1 - j/(N-i))` for `m = k - alpha`.
pub(crate) fn edge_factor(n: u64, k: u64, alpha: u64, i: u64) -> BigRational {
    let m = k - alpha;
    if m <= 1 {
        return BigRational::one();
    }
    let gap = n - i;
    ratio_of(falling(gap, m), pow(gap, m))
}

pub(crate) fn r_as_rational(n: u64, k: u64) -> BigRational {
    ratio_of(pow(n, k), falling(n, k))
}

#[cfg(test)]
pub(crate) fn frac(num: u64, den: u64) -> BigRational {
    crate::value::int(num) / crate::value::int(den)
}
