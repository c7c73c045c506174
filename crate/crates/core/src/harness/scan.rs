//! Row-by-row comparison of the conditional prefix probability `a_i` with
//! the iid kernel `b_i`, tagged by region.
//!
//! Exact rows use `a_i = (i)_alpha (N-i)_(k-alpha) / (N)_k` and
//! `b_i = i^alpha (N-i)^(k-alpha) / N^k`. The numerators share the same
//! shape, so `a_i / b_i <= r` reduces to comparing two integers.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::exact::{a_numerator, b_numerator, check_dims, falling, pow};
use crate::numerics::logspace::{log_a_unchecked, log_b_unchecked, log_r_unchecked, LogFactorialTable};
use crate::numerics::ratio::LOG_FACTORIZATION_TOL;
use crate::numerics::{Backend, LogValue, Region, RegionBounds, ResolvedBackend};
use crate::value::{ratio_of, Probability, Real};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub i: u64,
    pub a: Probability,
    pub b: Probability,
    /// Absent where `b_i = 0`, or where `a_i = 0` because `i < alpha`.
    pub ratio: Option<Probability>,
    pub region: Region,
}

/// Everything about a scan except its rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u64,
    pub alpha: u64,
    #[serde(rename = "M1")]
    pub m1: u64,
    #[serde(rename = "M2")]
    pub m2: u64,
    pub stride: u64,
    pub sampled: bool,
    pub backend: ResolvedBackend,
    pub r: Probability,
    /// `max |a_i/b_i - 1|` over the scanned rows of the middle window.
    pub eps_mid: Real,
    pub rows_scanned: u64,
    pub mid_rows_scanned: u64,
}

impl ScanSummary {
    pub fn eps_mid_f64(&self) -> f64 {
        self.eps_mid.to_f64()
    }

    pub fn bounds(&self) -> RegionBounds {
        RegionBounds {
            n: self.n,
            m1: self.m1,
            m2: self.m2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioScan {
    #[serde(flatten)]
    pub summary: ScanSummary,
    pub rows: Vec<ScanRow>,
}

impl RatioScan {
    pub fn eps_mid(&self) -> &Real {
        &self.summary.eps_mid
    }

    pub fn r(&self) -> &Probability {
        &self.summary.r
    }

    pub fn bounds(&self) -> RegionBounds {
        self.summary.bounds()
    }
}

/// Scans `i = 0, stride, 2 stride, ...` plus the region edges, collecting rows.
pub fn ratio_scan(n: u64, k: u64, alpha: u64, stride: u64, backend: Backend) -> Result<RatioScan> {
    let bounds = RegionBounds::new(n)?;
    ratio_scan_with_bounds(bounds, k, alpha, stride, backend)
}

pub fn ratio_scan_with_bounds(
    bounds: RegionBounds,
    k: u64,
    alpha: u64,
    stride: u64,
    backend: Backend,
) -> Result<RatioScan> {
    let mut rows = Vec::new();
    let summary = scan_rows(bounds, k, alpha, stride, backend, |row| rows.push(row))?;
    Ok(RatioScan { summary, rows })
}

/// Streaming scan: hands each row to `sink` in ascending `i` and returns the summary.
///
/// Fails with an invariant error if any row has `a_i / b_i > r`.
pub fn scan_rows(
    bounds: RegionBounds,
    k: u64,
    alpha: u64,
    stride: u64,
    backend: Backend,
    mut sink: impl FnMut(ScanRow),
) -> Result<ScanSummary> {
    let n = bounds.n;
    check_dims(n, k, alpha)?;
    if stride == 0 {
        return Err(Error::domain("stride must be at least 1"));
    }
    let backend = backend.resolve(n);
    let mut rows_scanned = 0;
    let mut mid_rows_scanned = 0;
    let (r, eps_mid) = match backend {
        ResolvedBackend::Exact => {
            let kernel = ExactKernel::new(n, k, alpha);
            let mut eps = Eps::default();
            for i in sample_indices(&bounds, stride) {
                let row = kernel.row(&bounds, i)?;
                if row.region == Region::Mid {
                    mid_rows_scanned += 1;
                    if let Some(Probability::Exact(ratio)) = &row.ratio {
                        eps.offer(ratio);
                    }
                }
                rows_scanned += 1;
                sink(row);
            }
            (Probability::Exact(kernel.r()), Real::Exact(eps.value()))
        }
        ResolvedBackend::Log => {
            let table = LogFactorialTable::global();
            let ln_r = log_r_unchecked(n, k);
            let mut eps: f64 = 0.0;
            for i in sample_indices(&bounds, stride) {
                let row = log_row(table, &bounds, k, alpha, i, ln_r)?;
                if row.region == Region::Mid {
                    mid_rows_scanned += 1;
                    if let Some(ratio) = &row.ratio {
                        eps = eps.max(ratio.ln().exp_m1().abs());
                    }
                }
                rows_scanned += 1;
                sink(row);
            }
            (Probability::Log(ln_r), Real::Float(eps))
        }
    };
    Ok(ScanSummary {
        n,
        k,
        alpha,
        m1: bounds.m1,
        m2: bounds.m2,
        stride,
        sampled: stride > 1,
        backend,
        r,
        eps_mid,
        rows_scanned,
        mid_rows_scanned,
    })
}

/// `0, stride, 2 stride, ...` merged with the region edges `M1, M1+1, M2, M2+1, N`.
pub fn sample_indices(bounds: &RegionBounds, stride: u64) -> impl Iterator<Item = u64> {
    let n = bounds.n;
    let mut forced: Vec<u64> = vec![bounds.m1, bounds.m1 + 1, bounds.m2, bounds.m2 + 1, n]
        .into_iter()
        .filter(|&i| i <= n)
        .collect();
    forced.sort_unstable();
    forced.dedup();
    let mut next_strided = Some(0u64);
    let mut forced = forced.into_iter().peekable();
    std::iter::from_fn(move || {
        let pick = match (next_strided, forced.peek().copied()) {
            (Some(s), Some(f)) => s.min(f),
            (Some(s), None) => s,
            (None, Some(f)) => f,
            (None, None) => return None,
        };
        if next_strided == Some(pick) {
            next_strided = pick.checked_add(stride).filter(|&s| s <= n);
        }
        if forced.peek() == Some(&pick) {
            forced.next();
        }
        Some(pick)
    })
}

/// Running maximum of `|ratio - 1|`.
#[derive(Default)]
struct Eps(Option<BigRational>);

impl Eps {
    fn offer(&mut self, ratio: &BigRational) {
        let d = (ratio - BigRational::from_integer(1.into())).abs();
        if self.0.as_ref().is_none_or(|cur| d > *cur) {
            self.0 = Some(d);
        }
    }

    fn value(self) -> BigRational {
        self.0.unwrap_or_else(BigRational::zero)
    }
}

/// Exact rows with the `N`-dependent denominators computed once.
pub(crate) struct ExactKernel {
    n: u64,
    k: u64,
    alpha: u64,
    /// `(N)_k`
    falling_nk: BigUint,
    /// `N^k`
    pow_nk: BigUint,
}

impl ExactKernel {
    pub(crate) fn new(n: u64, k: u64, alpha: u64) -> Self {
        ExactKernel {
            n,
            k,
            alpha,
            falling_nk: falling(n, k),
            pow_nk: pow(n, k),
        }
    }

    pub(crate) fn r(&self) -> BigRational {
        ratio_of(self.pow_nk.clone(), self.falling_nk.clone())
    }

    /// Numerators of `a_i` over `(N)_k` and of `b_i` over `N^k`.
    pub(crate) fn numerators(&self, i: u64) -> (BigUint, BigUint) {
        (
            a_numerator(self.n, self.k, self.alpha, i),
            b_numerator(self.n, self.k, self.alpha, i),
        )
    }

    pub(crate) fn falling_nk(&self) -> &BigUint {
        &self.falling_nk
    }

    pub(crate) fn pow_nk(&self) -> &BigUint {
        &self.pow_nk
    }

    /// `|a_i/b_i - 1|` as an unreduced pair `(num, den)`; `None` when `b_i = 0`.
    pub(crate) fn ratio_gap(&self, a_num: &BigUint, b_num: &BigUint) -> Option<(BigUint, BigUint)> {
        if b_num.is_zero() {
            return None;
        }
        let top = a_num * &self.pow_nk;
        let bottom = b_num * &self.falling_nk;
        let gap = if top >= bottom { &top - &bottom } else { &bottom - &top };
        Some((gap, bottom))
    }

    fn row(&self, bounds: &RegionBounds, i: u64) -> Result<ScanRow> {
        let (a_num, b_num) = self.numerators(i);
        // a_i/b_i <= r  <=>  (i)_alpha (N-i)_(k-alpha) <= i^alpha (N-i)^(k-alpha)
        if a_num > b_num {
            return Err(Error::invariant(format!(
                "a_i/b_i exceeds r at N={}, k={}, alpha={}, i={i}",
                self.n, self.k, self.alpha
            )));
        }
        let ratio = if b_num.is_zero() || (a_num.is_zero() && i < self.alpha) {
            None
        } else {
            Some(Probability::Exact(ratio_of(
                &a_num * &self.pow_nk,
                &b_num * &self.falling_nk,
            )))
        };
        Ok(ScanRow {
            i,
            a: Probability::Exact(ratio_of(a_num, self.falling_nk.clone())),
            b: Probability::Exact(ratio_of(b_num, self.pow_nk.clone())),
            ratio,
            region: bounds.region(i),
        })
    }
}

fn log_row(
    table: &LogFactorialTable,
    bounds: &RegionBounds,
    k: u64,
    alpha: u64,
    i: u64,
    ln_r: LogValue,
) -> Result<ScanRow> {
    let n = bounds.n;
    let a = log_a_unchecked(table, n, k, alpha, i);
    let b = log_b_unchecked(n, k, alpha, i);
    let ratio = if b.is_zero() || (a.is_zero() && i < alpha) {
        None
    } else {
        a.div(b)
    };
    if let Some(ratio) = ratio {
        if !ratio.is_zero() && ratio.ln() > ln_r.ln() + LOG_FACTORIZATION_TOL {
            return Err(Error::invariant(format!(
                "a_i/b_i = {} exceeds r = {} at N={n}, k={k}, alpha={alpha}, i={i}",
                ratio.value(),
                ln_r.value()
            )));
        }
    }
    Ok(ScanRow {
        i,
        a: Probability::Log(a),
        b: Probability::Log(b),
        ratio: ratio.map(Probability::Log),
        region: bounds.region(i),
    })
}
