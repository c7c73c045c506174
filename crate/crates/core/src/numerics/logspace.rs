//! Log-space backend for N far beyond what exact rationals can handle.
//!
//! Log-factorials up to the table cap are prefix sums of `ln j` kept in
//! double-double precision, so `ln C(n, r)` is a difference of three
//! accurately stored values. Above the cap `ln C(n, r)` goes through
//! Stirling's formula with an explicit remainder series. Either way the
//! absolute error of `ln C(n, r)` is a few ulps of its magnitude, i.e. a
//! relative error of `C(n, r)` below `1e-10` for `n` up to about `10^6`.

use std::cmp::Ordering;
use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::exact::{check_dims, check_index};

/// Default number of log-factorial entries before switching to Stirling.
pub const DEFAULT_TABLE_CAP: u64 = 10_000_000;

/// Environment variable that overrides [`DEFAULT_TABLE_CAP`].
pub const TABLE_CAP_ENV: &str = "DEFINETTI_TABLE_CAP";

const CHUNK: u64 = 1 << 16;
const MIN_CAP: u64 = 32;

/// A nonnegative number stored as its natural log; `-inf` marks exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue(f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);

    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan() && ln != f64::INFINITY, "bad log value {ln}");
        LogValue(ln)
    }

    pub fn from_value(x: f64) -> Self {
        debug_assert!(x >= 0.0, "log-space values are nonnegative, got {x}");
        LogValue(x.ln())
    }

    /// `ln` of a nonnegative rational, without overflowing through `f64`.
    pub fn from_rational(r: &BigRational) -> Self {
        debug_assert!(!r.is_negative());
        if r.is_zero() {
            return LogValue::ZERO;
        }
        let num = r.numer().magnitude();
        let den = r.denom().magnitude();
        LogValue(ln_biguint(num) - ln_biguint(den))
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn mul(self, other: LogValue) -> LogValue {
        if self.is_zero() || other.is_zero() {
            return LogValue::ZERO;
        }
        LogValue(self.0 + other.0)
    }

    /// Division; `None` when dividing by zero.
    pub fn div(self, other: LogValue) -> Option<LogValue> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LogValue::ZERO);
        }
        Some(LogValue(self.0 - other.0))
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

pub(crate) fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * LN_2
}

#[derive(Debug, Clone, Copy, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

impl DoubleDouble {
    fn add_f64(self, x: f64) -> Self {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = two_sum(s, e + self.lo);
        DoubleDouble { hi, lo }
    }
}

/// Prefix sums `ln n!` for `n <= cap`, built chunk by chunk on first touch.
///
/// Each chunk is written once and never mutated afterwards, so lookups are
/// lock-free after warm-up.
pub struct LogFactorialTable {
    cap: u64,
    chunks: Vec<OnceLock<Box<[DoubleDouble]>>>,
}

impl LogFactorialTable {
    pub fn new(cap: u64) -> Self {
        let cap = cap.max(MIN_CAP);
        let n_chunks = (cap / CHUNK + 1) as usize;
        LogFactorialTable {
            cap,
            chunks: (0..n_chunks).map(|_| OnceLock::new()).collect(),
        }
    }

    /// The process-wide table, sized from `DEFINETTI_TABLE_CAP` if set.
    pub fn global() -> &'static LogFactorialTable {
        static TABLE: OnceLock<LogFactorialTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            let cap = std::env::var(TABLE_CAP_ENV)
                .ok()
                .and_then(|v| v.trim().parse::<u64>().ok())
                .unwrap_or(DEFAULT_TABLE_CAP);
            LogFactorialTable::new(cap)
        })
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    fn chunk(&self, c: usize) -> &[DoubleDouble] {
        if let Some(chunk) = self.chunks[c].get() {
            return chunk;
        }
        let mut carry = DoubleDouble::default();
        for j in 0..=c {
            let chunk = self.chunks[j].get_or_init(|| {
                let start = j as u64 * CHUNK;
                let mut acc = carry;
                (0..CHUNK)
                    .map(|t| {
                        let m = start + t;
                        if m >= 2 {
                            acc = acc.add_f64((m as f64).ln());
                        }
                        acc
                    })
                    .collect()
            });
            carry = chunk[CHUNK as usize - 1];
        }
        self.chunks[c].get().expect("initialized above")
    }

    fn entry(&self, n: u64) -> DoubleDouble {
        debug_assert!(n <= self.cap);
        self.chunk((n / CHUNK) as usize)[(n % CHUNK) as usize]
    }

    /// `ln n!`. Exact table entry below the cap, Stirling above.
    pub fn ln_factorial(&self, n: u64) -> f64 {
        if n <= self.cap {
            let e = self.entry(n);
            e.hi + e.lo
        } else {
            let m = n as f64;
            m * m.ln() - m + 0.5 * (2.0 * PI * m).ln() + self.stirling_remainder(n)
        }
    }

    /// `ln n! - (n ln n - n + ln(2 pi n)/2)` for `n >= 1`.
    fn stirling_remainder(&self, n: u64) -> f64 {
        debug_assert!(n >= 1);
        if n <= 15 {
            let m = n as f64;
            let e = self.entry(n);
            return (e.hi - (m * m.ln() - m + 0.5 * (2.0 * PI * m).ln())) + e.lo;
        }
        let m = n as f64;
        let inv = 1.0 / m;
        let inv2 = inv * inv;
        // Bernoulli-number series, truncated after the n^-9 term.
        inv * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))))
    }

    /// `ln C(n, r)`, [`LogValue::ZERO`] outside `0 <= r <= n`.
    pub fn log_binomial(&self, n: u64, r: i64) -> LogValue {
        if r < 0 || r as u64 > n {
            return LogValue::ZERO;
        }
        let r = r as u64;
        let s = r.min(n - r);
        if s == 0 {
            return LogValue::ONE;
        }
        if n <= self.cap {
            let top = self.entry(n);
            let a = self.entry(r);
            let b = self.entry(n - r);
            let (s1, e1) = two_sum(top.hi, -a.hi);
            let (s2, e2) = two_sum(s1, -b.hi);
            return LogValue(s2 + ((e1 + e2) + (top.lo - a.lo - b.lo)));
        }
        let (nf, rf, sf) = (n as f64, r as f64, (n - r) as f64);
        let main = rf * (nf / rf).ln() + sf * (rf / sf).ln_1p();
        let half = 0.5 * (nf / (2.0 * PI * rf * sf)).ln();
        let corr = self.stirling_remainder(n) - self.stirling_remainder(r) - self.stirling_remainder(n - r);
        LogValue(main + half + corr)
    }
}

/// Deviance term `x ln(x/m) + m - x`, accurate when `x` is close to `m`.
fn deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let next = s + ej / (2 * j + 1) as f64;
            if next == s {
                return next;
            }
            s = next;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

impl LogFactorialTable {
    /// `ln P(Binomial(n, p) = i)` by the saddle-point expansion, which keeps
    /// the large `i ln p` and `ln C(n, i)` terms from cancelling in floating point.
    pub fn log_binomial_pmf(&self, n: u64, i: u64, p: f64) -> LogValue {
        debug_assert!((0.0..=1.0).contains(&p) && i <= n);
        let q = 1.0 - p;
        if p == 0.0 {
            return if i == 0 { LogValue::ONE } else { LogValue::ZERO };
        }
        if p == 1.0 {
            return if i == n { LogValue::ONE } else { LogValue::ZERO };
        }
        let nf = n as f64;
        if i == 0 {
            return LogValue(nf * (-p).ln_1p());
        }
        if i == n {
            return LogValue(nf * p.ln());
        }
        let (x, y) = (i as f64, (n - i) as f64);
        let lc = self.stirling_remainder(n)
            - self.stirling_remainder(i)
            - self.stirling_remainder(n - i)
            - deviance(x, nf * p)
            - deviance(y, nf * q);
        let lf = (2.0 * PI).ln() + x.ln() + (-x / nf).ln_1p();
        LogValue(lc - 0.5 * lf)
    }
}

/// `ln C(n, r)` using the global table.
pub fn log_binomial(n: u64, r: i64) -> LogValue {
    LogFactorialTable::global().log_binomial(n, r)
}

/// Log-space `a_i = C(N-k, i-alpha) / C(N, i)`.
pub fn log_a_i(n: u64, k: u64, alpha: u64, i: u64) -> Result<LogValue> {
    check_dims(n, k, alpha)?;
    check_index(n, i)?;
    Ok(log_a_unchecked(LogFactorialTable::global(), n, k, alpha, i))
}

pub(crate) fn log_a_unchecked(table: &LogFactorialTable, n: u64, k: u64, alpha: u64, i: u64) -> LogValue {
    if i < alpha || i - alpha > n - k {
        return LogValue::ZERO;
    }
    let top = table.log_binomial(n - k, (i - alpha) as i64);
    let bottom = table.log_binomial(n, i as i64);
    top.div(bottom).expect("C(N, i) > 0 for i <= N")
}

/// Log-space `b_i = (i/N)^alpha (1 - i/N)^(k-alpha)` with `0^0 = 1`.
pub fn log_b_i(n: u64, k: u64, alpha: u64, i: u64) -> Result<LogValue> {
    if n == 0 || alpha > k {
        return Err(Error::domain(format!("invalid (N={n}, k={k}, alpha={alpha})")));
    }
    check_index(n, i)?;
    Ok(log_b_unchecked(n, k, alpha, i))
}

pub(crate) fn log_b_unchecked(n: u64, k: u64, alpha: u64, i: u64) -> LogValue {
    let zeros = k - alpha;
    if (alpha > 0 && i == 0) || (zeros > 0 && i == n) {
        return LogValue::ZERO;
    }
    let nf = n as f64;
    let mut ln = 0.0;
    if alpha > 0 {
        ln += alpha as f64 * (i as f64 / nf).ln();
    }
    if zeros > 0 {
        ln += zeros as f64 * ((n - i) as f64 / nf).ln();
    }
    LogValue(ln)
}

/// Log-space `r = N^k / (N (N-1) ... (N-k+1))`.
pub fn log_r_constant(n: u64, k: u64) -> Result<LogValue> {
    if n == 0 || k > n {
        return Err(Error::domain(format!("r needs 0 <= k <= N, got k={k}, N={n}")));
    }
    Ok(log_r_unchecked(n, k))
}

pub(crate) fn log_r_unchecked(n: u64, k: u64) -> LogValue {
    let nf = n as f64;
    let ln: f64 = (1..k).map(|j| -(-(j as f64) / nf).ln_1p()).sum();
    LogValue(ln)
}
