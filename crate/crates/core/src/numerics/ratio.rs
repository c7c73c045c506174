//! The split of `a_i / b_i` into three factors whose product is the ratio:
//!
//! ```text
//! a_i / b_i = [i! / ((i-alpha)! i^alpha)] * prod_{j=1}^{k-alpha-1} (1 - j/(N-i)) * r
//! ```
//!
//! The first two factors are at most one, which bounds the ratio by `r`.

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::exact::{self, check_dims, check_index, edge_factor, falling_factor};
use crate::numerics::logspace::{self, LogValue};
use crate::numerics::ResolvedBackend;
use crate::value::Probability;

/// Relative tolerance between factorized and direct ratios in log space.
pub const LOG_FACTORIZATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioFactors {
    /// `i! / ((i - alpha)! i^alpha)`
    pub falling: Probability,
    /// `prod_{j=1}^{k-alpha-1} (1 - j/(N-i))`
    pub edge: Probability,
    pub r: Probability,
    /// `a_i / b_i` computed directly from the two kernels.
    pub direct: Probability,
}

impl RatioFactors {
    pub fn product_f64(&self) -> f64 {
        self.falling.to_f64() * self.edge.to_f64() * self.r.to_f64()
    }
}

/// Factorizes `a_i / b_i` and checks it against the direct quotient and the bound `r`.
///
/// Fails with a domain error when `b_i = 0` and with an invariant error if the
/// two evaluation orders disagree or the ratio exceeds `r`.
pub fn ratio_factorization(n: u64, k: u64, alpha: u64, i: u64, backend: ResolvedBackend) -> Result<RatioFactors> {
    check_dims(n, k, alpha)?;
    check_index(n, i)?;
    if (alpha > 0 && i == 0) || (k > alpha && i == n) {
        return Err(Error::domain(format!("b_i = 0 at i={i}; the ratio is undefined")));
    }
    match backend {
        ResolvedBackend::Exact => {
            let falling = falling_factor(i, alpha);
            let edge = edge_factor(n, k, alpha, i);
            let r = exact::r_as_rational(n, k);
            let direct: BigRational = exact::a_i(n, k, alpha, i)? / exact::b_i(n, k, alpha, i)?;
            let product = &falling * &edge * &r;
            if product != direct {
                return Err(Error::invariant(format!(
                    "factorized ratio {product} differs from a_i/b_i = {direct} at i={i}"
                )));
            }
            if direct > r {
                return Err(Error::invariant(format!("a_i/b_i = {direct} exceeds r = {r} at i={i}")));
            }
            Ok(RatioFactors {
                falling: Probability::Exact(falling),
                edge: Probability::Exact(edge),
                r: Probability::Exact(r),
                direct: Probability::Exact(direct),
            })
        }
        ResolvedBackend::Log => {
            let falling = log_falling_factor(i, alpha);
            let edge = log_edge_factor(n, k, alpha, i);
            let r = logspace::log_r_unchecked(n, k);
            let a = logspace::log_a_i(n, k, alpha, i)?;
            let b = logspace::log_b_i(n, k, alpha, i)?;
            let direct = a.div(b).expect("b_i > 0 checked above");
            let product = falling.mul(edge).mul(r);
            let agree = if direct.is_zero() || product.is_zero() {
                direct.is_zero() && product.is_zero()
            } else {
                (product.ln() - direct.ln()).abs() <= LOG_FACTORIZATION_TOL
            };
            if !agree {
                return Err(Error::invariant(format!(
                    "factorized ratio {} differs from a_i/b_i = {} at i={i}",
                    product.value(),
                    direct.value()
                )));
            }
            if !direct.is_zero() && direct.ln() > r.ln() + LOG_FACTORIZATION_TOL {
                return Err(Error::invariant(format!(
                    "a_i/b_i = {} exceeds r = {} at i={i}",
                    direct.value(),
                    r.value()
                )));
            }
            Ok(RatioFactors {
                falling: Probability::Log(falling),
                edge: Probability::Log(edge),
                r: Probability::Log(r),
                direct: Probability::Log(direct),
            })
        }
    }
}

fn log_falling_factor(i: u64, alpha: u64) -> LogValue {
    if alpha == 0 {
        return LogValue::ONE;
    }
    if i < alpha {
        return LogValue::ZERO;
    }
    let fi = i as f64;
    LogValue::from_ln((1..alpha).map(|j| (-(j as f64) / fi).ln_1p()).sum())
}

fn log_edge_factor(n: u64, k: u64, alpha: u64, i: u64) -> LogValue {
    let m = k - alpha;
    if m <= 1 {
        return LogValue::ONE;
    }
    let gap = n - i;
    if gap < m {
        return LogValue::ZERO;
    }
    let g = gap as f64;
    LogValue::from_ln((1..m).map(|j| (-(j as f64) / g).ln_1p()).sum())
}
