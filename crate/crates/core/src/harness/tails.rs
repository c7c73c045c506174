//! The two tail estimates of the proof, checked with exact integers.
//!
//! Lower tail (`alpha >= 1`): `sum_{i <= M1} b_i <= M1^(1+alpha) / N^alpha <= N^(-(2 alpha - 1)/3)`.
//! Upper tail (`alpha <= k - 1`): `max_{i > M2} b_i <= N^(-(k - alpha)/2)`.
//! Both right-hand sides are irrational in general, so the comparisons are
//! made after raising both sides to an integer power.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::Result;
use crate::numerics::exact::{b_numerator, check_dims, pow};
use crate::numerics::RegionBounds;
use crate::value::{ratio_of, Real};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TailBound {
    NotApplicable,
    Checked {
        /// The computed tail quantity, exact.
        value: Real,
        /// `N^(-(2 alpha - 1)/3)` or `N^(-(k - alpha)/2)`, for display.
        bound: f64,
        ok: bool,
        /// Lower tail only: the intermediate `M1^(1+alpha) / N^alpha` and whether
        /// both links of the chain hold.
        #[serde(skip_serializing_if = "Option::is_none")]
        chain: Option<Real>,
        #[serde(skip_serializing_if = "Option::is_none")]
        chain_ok: Option<bool>,
        /// Upper tail only: where the maximum is attained.
        #[serde(skip_serializing_if = "Option::is_none")]
        argmax: Option<u64>,
    },
}

impl TailBound {
    /// Not-applicable counts as satisfied.
    pub fn ok(&self) -> bool {
        match self {
            TailBound::NotApplicable => true,
            TailBound::Checked { ok, chain_ok, .. } => *ok && chain_ok.unwrap_or(true),
        }
    }

    pub fn is_applicable(&self) -> bool {
        !matches!(self, TailBound::NotApplicable)
    }

    pub fn value(&self) -> Option<&Real> {
        match self {
            TailBound::NotApplicable => None,
            TailBound::Checked { value, .. } => Some(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCheck {
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u64,
    pub alpha: u64,
    #[serde(rename = "M1")]
    pub m1: u64,
    #[serde(rename = "M2")]
    pub m2: u64,
    pub lower: TailBound,
    pub upper: TailBound,
}

impl TailCheck {
    pub fn lower_ok(&self) -> bool {
        self.lower.ok()
    }

    pub fn upper_ok(&self) -> bool {
        self.upper.ok()
    }
}

/// `N^(-(2 alpha - 1)/3)`, the lower-tail bound.
pub fn lower_tail_target(n: u64, alpha: u64) -> Option<f64> {
    (alpha >= 1).then(|| (n as f64).powf(-((2 * alpha - 1) as f64) / 3.0))
}

/// `N^(-(k - alpha)/2)`, the upper-tail bound.
pub fn upper_tail_target(n: u64, k: u64, alpha: u64) -> Option<f64> {
    (alpha < k).then(|| (n as f64).powf(-((k - alpha) as f64) / 2.0))
}

pub fn tail_bounds_check(n: u64, k: u64, alpha: u64) -> Result<TailCheck> {
    let bounds = RegionBounds::new(n)?;
    tail_bounds_check_with_bounds(bounds, k, alpha)
}

pub fn tail_bounds_check_with_bounds(bounds: RegionBounds, k: u64, alpha: u64) -> Result<TailCheck> {
    let n = bounds.n;
    check_dims(n, k, alpha)?;
    let n_big = BigUint::from(n);
    let n_pow_k = pow(n, k);

    let lower = match lower_tail_target(n, alpha) {
        None => TailBound::NotApplicable,
        Some(bound) => {
            // S = s / N^k with s = sum_{i <= M1} i^alpha (N-i)^(k-alpha); i = 0 contributes 0.
            let s: BigUint = (1..=bounds.m1).map(|i| b_numerator(n, k, alpha, i)).sum();
            // S^3 N^(2 alpha - 1) <= 1
            let ok = num_traits::pow(s.clone(), 3) * num_traits::pow(n_big.clone(), (2 * alpha - 1) as usize)
                <= num_traits::pow(n_pow_k.clone(), 3);
            // S <= M1^(1+alpha) / N^alpha  <=>  s <= M1^(1+alpha) N^(k-alpha)
            let chain_num = pow(bounds.m1, 1 + alpha);
            let first = s <= &chain_num * pow(n, k - alpha);
            // M1^(1+alpha) / N^alpha <= N^(-(2 alpha - 1)/3)  <=>  M1^(3+3 alpha) <= N^(1+alpha)
            let second = num_traits::pow(chain_num.clone(), 3) <= pow(n, 1 + alpha);
            TailBound::Checked {
                value: Real::Exact(ratio_of(s, n_pow_k.clone())),
                bound,
                ok,
                chain: Some(Real::Exact(ratio_of(chain_num, pow(n, alpha)))),
                chain_ok: Some(first && second),
                argmax: None,
            }
        }
    };

    let upper = match upper_tail_target(n, k, alpha) {
        None => TailBound::NotApplicable,
        Some(bound) => {
            let mut best = BigUint::zero();
            let mut argmax = bounds.m2 + 1;
            for i in bounds.m2 + 1..=n {
                let b = b_numerator(n, k, alpha, i);
                if b > best {
                    best = b;
                    argmax = i;
                }
            }
            // max^2 N^(k-alpha) <= 1
            let ok = num_traits::pow(best.clone(), 2) * pow(n, k - alpha) <= num_traits::pow(n_pow_k.clone(), 2);
            TailBound::Checked {
                value: Real::Exact(ratio_of(best, n_pow_k)),
                bound,
                ok,
                chain: None,
                chain_ok: None,
                argmax: Some(argmax),
            }
        }
    };

    Ok(TailCheck {
        n,
        k,
        alpha,
        m1: bounds.m1,
        m2: bounds.m2,
        lower,
        upper,
    })
}
