//! Both sides of the finite theorem, `sum a_i q_i` against `sum b_i q_i`,
//! split by region with an explicit error budget.
//!
//! In the middle window each term satisfies `|a_i - b_i| q_i <= eps_mid b_i q_i`,
//! and outside it the two partial sums are simply added, so
//! `|lhs - rhs| <= eps_mid rhs_mid + lhs_lower + rhs_lower + lhs_upper + rhs_upper`
//! holds by construction. The report carries every term of that inequality.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::sandwich::{sandwich_bound_integers, sandwich_bound_iter, SandwichReport};
use crate::harness::scan::ExactKernel;
use crate::harness::tails::{lower_tail_target, upper_tail_target};
use crate::model::{sample_mean_law, LawWeights, MixingMeasure, PrefixEvent, SampleMeanLaw, FLOAT_ZERO_PROB};
use crate::numerics::exact::check_dims;
use crate::numerics::logspace::{log_a_unchecked, log_b_unchecked, LogFactorialTable};
use crate::numerics::{Backend, CompensatedSum, Region, RegionBounds, ResolvedBackend};
use crate::value::{ratio_of, Real};

/// Relative slack on the float budget comparison, covering rounding in the
/// log-space kernels (about `1e-10` relative per term).
pub const FLOAT_BUDGET_SLACK: f64 = 1e-9;

/// What the two sides are computed from.
#[derive(Debug, Clone, Copy)]
pub enum Source<'a> {
    /// The mixture `mu` observed through its first `n` coordinates.
    Mixture { mu: &'a MixingMeasure, n: u64 },
    /// An exchangeable law given by its count statistic.
    Law(&'a SampleMeanLaw),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSums {
    pub lower: Real,
    pub mid: Real,
    pub upper: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u64,
    pub alpha: u64,
    pub pattern: String,
    pub backend: ResolvedBackend,
    #[serde(rename = "M1")]
    pub m1: u64,
    #[serde(rename = "M2")]
    pub m2: u64,
    /// `sum_i a_i q_i`
    pub lhs: Real,
    /// `sum_i b_i q_i`
    pub rhs: Real,
    pub abs_diff: Real,
    pub lhs_regions: RegionSums,
    pub rhs_regions: RegionSums,
    /// `max |a_i/b_i - 1|` over the whole middle window.
    pub eps_mid: Real,
    pub sandwich_bound: Real,
    pub within_budget: bool,
    /// Termwise sandwich on the middle window: must contain `lhs_regions.mid`.
    pub mid_sandwich: SandwichReport,
    /// `N^(-(2 alpha - 1)/3)` for `alpha >= 1`: target for the lower-tail sum.
    #[serde(rename = "lemma10_bound")]
    pub lower_tail_bound: Option<f64>,
    /// `N^(-(k - alpha)/2)` for `alpha <= k - 1`: target for the largest upper-tail `b_i`.
    #[serde(rename = "lemma12_bound")]
    pub upper_tail_bound: Option<f64>,
    pub pathological: bool,
    /// `"pathological"` for an exact zero, `"numerically pathological"` for a float one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pathology: Option<&'static str>,
    /// `sum_{i < alpha} b_i q_i`
    pub rhs_below_alpha: Real,
    /// `sum_{i < alpha} b_i`, the bound on `rhs` in the pathological case.
    pub b_below_alpha: Real,
    /// In the pathological case, whether `rhs` is exactly its `i < alpha` part.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs_only_below_alpha: Option<bool>,
}

/// Verifies with the default regions.
pub fn verify_theorem(source: Source<'_>, e: &PrefixEvent, backend: Backend) -> Result<VerificationReport> {
    let n = match source {
        Source::Mixture { n, .. } => n,
        Source::Law(law) => law.n(),
    };
    verify_theorem_with_bounds(source, e, backend, RegionBounds::new(n)?)
}

pub fn verify_theorem_with_bounds(
    source: Source<'_>,
    e: &PrefixEvent,
    backend: Backend,
    bounds: RegionBounds,
) -> Result<VerificationReport> {
    let n = bounds.n;
    check_dims(n, e.k(), e.alpha())?;
    let law = match source {
        Source::Mixture { mu, n: src_n } => {
            if src_n != n {
                return Err(Error::domain(format!(
                    "regions are for N={n} but the source has N={src_n}"
                )));
            }
            let resolved = match backend {
                Backend::Auto if !mu.is_exact() => ResolvedBackend::Log,
                other => other.resolve(n),
            };
            sample_mean_law(mu, n, resolved)?
        }
        Source::Law(law) => {
            if law.n() != n {
                return Err(Error::domain(format!(
                    "regions are for N={n} but the law has N={}",
                    law.n()
                )));
            }
            match (backend.resolve(n), law.is_exact()) {
                (ResolvedBackend::Log, true) if backend != Backend::Auto || n > crate::numerics::AUTO_EXACT_MAX_N => {
                    law.to_float()
                }
                (ResolvedBackend::Exact, false) if backend == Backend::Exact => {
                    return Err(Error::NotExact("an exact run needs rational law weights".into()));
                }
                _ => law.clone(),
            }
        }
    };
    match law.weights() {
        LawWeights::Exact(_) => verify_exact(&law, e, bounds),
        LawWeights::Float(_) => verify_float(&law, e, bounds),
    }
}

fn region_slot(bounds: &RegionBounds, i: u64) -> usize {
    match bounds.region(i) {
        Region::Lower => 0,
        Region::Mid => 1,
        Region::Upper => 2,
    }
}

fn verify_exact(law: &SampleMeanLaw, e: &PrefixEvent, bounds: RegionBounds) -> Result<VerificationReport> {
    let w = law.exact().expect("exact law");
    let (n, k, alpha) = (bounds.n, e.k(), e.alpha());
    let kernel = ExactKernel::new(n, k, alpha);

    // Every term is an integer over a shared denominator:
    // a_i q_i = A_i / ((N)_k D), b_i q_i = B_i / (N^k D).
    let mut a_sums = [BigUint::zero(), BigUint::zero(), BigUint::zero()];
    let mut b_sums = [BigUint::zero(), BigUint::zero(), BigUint::zero()];
    let mut below_alpha = BigUint::zero();
    let mut b_below_alpha = BigUint::zero();
    let mut eps: Option<(BigUint, BigUint)> = None;
    // Middle-window terms rescaled to the common denominator N^k (N)_k D.
    let mut mid_terms = Vec::new();

    for i in 0..=n {
        let slot = region_slot(&bounds, i);
        let (a_num, b_num) = kernel.numerators(i);
        if i < alpha {
            b_below_alpha += &b_num;
        }
        if slot == 1 {
            if let Some((gap, den)) = kernel.ratio_gap(&a_num, &b_num) {
                // keep the larger of gap/den and the current maximum
                if eps.as_ref().is_none_or(|(g, d)| &gap * d > g * &den) {
                    eps = Some((gap, den));
                }
            }
        }
        let q = &w.numerators()[i as usize];
        if q.is_zero() {
            continue;
        }
        let a_term = a_num * q;
        let b_term = b_num * q;
        if i < alpha {
            below_alpha += &b_term;
        }
        if slot == 1 {
            mid_terms.push((&a_term * kernel.pow_nk(), &b_term * kernel.falling_nk()));
        }
        a_sums[slot] += a_term;
        b_sums[slot] += b_term;
    }

    let d = w.denominator();
    let a_den = kernel.falling_nk() * d;
    let b_den = kernel.pow_nk() * d;
    let lhs_parts: Vec<BigRational> = a_sums.iter().map(|s| ratio_of(s.clone(), a_den.clone())).collect();
    let rhs_parts: Vec<BigRational> = b_sums.iter().map(|s| ratio_of(s.clone(), b_den.clone())).collect();
    let lhs: BigRational = lhs_parts.iter().sum();
    let rhs: BigRational = rhs_parts.iter().sum();
    let abs_diff = (&lhs - &rhs).abs();
    let eps = eps.map_or_else(BigRational::zero, |(g, d)| ratio_of(g, d));
    let budget = &eps * &rhs_parts[1] + &lhs_parts[0] + &rhs_parts[0] + &lhs_parts[2] + &rhs_parts[2];

    let common = kernel.pow_nk() * kernel.falling_nk() * d;
    let mid_report = sandwich_bound_integers(mid_terms, &common, &eps)?.to_report();

    let pathological = lhs.is_zero();
    let rhs_below = ratio_of(below_alpha, b_den);
    let rhs_only_below = pathological.then(|| rhs == rhs_below);
    Ok(VerificationReport {
        n,
        k,
        alpha,
        pattern: e.to_string(),
        backend: ResolvedBackend::Exact,
        m1: bounds.m1,
        m2: bounds.m2,
        within_budget: abs_diff <= budget,
        lhs: Real::Exact(lhs),
        rhs: Real::Exact(rhs),
        abs_diff: Real::Exact(abs_diff),
        lhs_regions: regions(lhs_parts),
        rhs_regions: regions(rhs_parts),
        eps_mid: Real::Exact(eps),
        sandwich_bound: Real::Exact(budget),
        mid_sandwich: mid_report,
        lower_tail_bound: lower_tail_target(n, alpha),
        upper_tail_bound: upper_tail_target(n, k, alpha),
        pathological,
        pathology: pathological.then_some("pathological"),
        rhs_below_alpha: Real::Exact(rhs_below),
        b_below_alpha: Real::Exact(ratio_of(b_below_alpha, kernel.pow_nk().clone())),
        rhs_only_below_alpha: rhs_only_below,
    })
}

fn regions<T: Into<Real>>(parts: Vec<T>) -> RegionSums {
    let mut it = parts.into_iter().map(Into::into);
    RegionSums {
        lower: it.next().expect("three regions"),
        mid: it.next().expect("three regions"),
        upper: it.next().expect("three regions"),
    }
}

fn verify_float(law: &SampleMeanLaw, e: &PrefixEvent, bounds: RegionBounds) -> Result<VerificationReport> {
    let LawWeights::Float(q) = law.weights() else {
        unreachable!("float law")
    };
    let (n, k, alpha) = (bounds.n, e.k(), e.alpha());
    let table = LogFactorialTable::global();

    let mut a_sums = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
    let mut b_sums = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
    let mut below_alpha = CompensatedSum::new();
    let mut b_below_alpha = CompensatedSum::new();
    let mut eps: f64 = 0.0;
    let mut mid_terms = Vec::new();

    // Fixed ascending order so repeated runs give identical sums.
    for i in 0..=n {
        let slot = region_slot(&bounds, i);
        let la = log_a_unchecked(table, n, k, alpha, i);
        let lb = log_b_unchecked(n, k, alpha, i);
        let b = lb.value();
        if i < alpha {
            b_below_alpha.add(b);
        }
        if slot == 1 && !lb.is_zero() {
            let gap = if la.is_zero() {
                1.0
            } else {
                (la.ln() - lb.ln()).exp_m1().abs()
            };
            eps = eps.max(gap);
        }
        let qi = q[i as usize];
        if qi == 0.0 {
            continue;
        }
        let a_term = la.value() * qi;
        let b_term = b * qi;
        if i < alpha {
            below_alpha.add(b_term);
        }
        if slot == 1 {
            mid_terms.push((a_term, b_term));
        }
        a_sums[slot].add(a_term);
        b_sums[slot].add(b_term);
    }

    let lhs_parts: Vec<f64> = a_sums.iter().map(CompensatedSum::value).collect();
    let rhs_parts: Vec<f64> = b_sums.iter().map(CompensatedSum::value).collect();
    let lhs: f64 = a_sums
        .iter()
        .fold(CompensatedSum::new(), |mut acc, s| {
            acc.add(s.value());
            acc
        })
        .value();
    let rhs: f64 = b_sums
        .iter()
        .fold(CompensatedSum::new(), |mut acc, s| {
            acc.add(s.value());
            acc
        })
        .value();
    let abs_diff = (lhs - rhs).abs();
    let budget = eps * rhs_parts[1] + lhs_parts[0] + rhs_parts[0] + lhs_parts[2] + rhs_parts[2];
    let slack = FLOAT_BUDGET_SLACK * lhs.max(rhs) + f64::MIN_POSITIVE;
    // the float eps carries the same rounding as the terms it bounds
    let mid = sandwich_bound_iter(mid_terms, &(eps + FLOAT_BUDGET_SLACK))?;

    let pathological = lhs < FLOAT_ZERO_PROB;
    let rhs_below = below_alpha.value();
    Ok(VerificationReport {
        n,
        k,
        alpha,
        pattern: e.to_string(),
        backend: ResolvedBackend::Log,
        m1: bounds.m1,
        m2: bounds.m2,
        lhs: Real::Float(lhs),
        rhs: Real::Float(rhs),
        abs_diff: Real::Float(abs_diff),
        lhs_regions: regions(lhs_parts),
        rhs_regions: regions(rhs_parts),
        eps_mid: Real::Float(eps),
        sandwich_bound: Real::Float(budget),
        within_budget: abs_diff <= budget + slack,
        mid_sandwich: mid.to_report(),
        lower_tail_bound: lower_tail_target(n, alpha),
        upper_tail_bound: upper_tail_target(n, k, alpha),
        pathological,
        pathology: pathological.then_some("numerically pathological"),
        rhs_below_alpha: Real::Float(rhs_below),
        b_below_alpha: Real::Float(b_below_alpha.value()),
        rhs_only_below_alpha: pathological.then(|| (rhs - rhs_below).abs() <= slack),
    })
}
