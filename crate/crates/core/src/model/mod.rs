//! Mixing measures, prefix events, sample-mean laws and moment vectors, and
//! the conversions among them.

pub mod law;
pub mod measure;
pub mod moments;
pub mod prefix;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

pub use law::{ExactWeights, LawWeights, SampleMeanLaw};
pub use measure::{Atom, MixingMeasure};
pub use moments::{
    check_complete_monotonicity, mean_law_from_moments, mean_law_from_moments_detailed, moments_from_measure,
    prefix_prob_from_moments, InversionDiagnostics, MomentVector, MonotonicityVerdict,
};
pub use prefix::PrefixEvent;

use crate::error::{Error, Result};
use crate::numerics::exact::{a_numerator, falling};
use crate::numerics::logspace::{log_a_unchecked, LogFactorialTable};
use crate::numerics::{CompensatedSum, LogValue, ResolvedBackend};
use crate::value::{Probability, Real};

/// Float prefix probabilities below this count as zero.
pub const FLOAT_ZERO_PROB: f64 = 1e-15;

/// `sum_atoms w p^alpha (1-p)^(k-alpha)`: the right side of the mixture representation.
pub fn mixture_prefix_prob(mu: &MixingMeasure, e: &PrefixEvent) -> Probability {
    let (k, alpha) = (e.k() as usize, e.alpha() as usize);
    match mu.exact_atoms() {
        Some(atoms) => {
            let one = BigRational::one();
            let total = atoms.iter().fold(BigRational::zero(), |acc, a| {
                acc + &a.w * num_traits::pow(a.p.clone(), alpha) * num_traits::pow(&one - &a.p, k - alpha)
            });
            Probability::Exact(total)
        }
        None => {
            let value = mu
                .float_atoms()
                .iter()
                .map(|a| a.w * a.p.powi(alpha as i32) * (1.0 - a.p).powi((k - alpha) as i32))
                .collect::<CompensatedSum>()
                .value();
            Probability::Log(LogValue::from_value(value.max(0.0)))
        }
    }
}

/// Law of `Y_N` under the mixture: `q_i = sum_atoms w C(N,i) p^i (1-p)^(N-i)`.
pub fn sample_mean_law(mu: &MixingMeasure, n: u64, backend: ResolvedBackend) -> Result<SampleMeanLaw> {
    if n == 0 {
        return Err(Error::domain("N must be positive"));
    }
    match backend {
        ResolvedBackend::Exact => exact_sample_mean_law(mu, n),
        ResolvedBackend::Log => Ok(log_sample_mean_law(mu, n)),
    }
}

fn exact_sample_mean_law(mu: &MixingMeasure, n: u64) -> Result<SampleMeanLaw> {
    let atoms = mu.require_exact("exact sample-mean law")?;
    // Atom p = u/v with weight wn/wd contributes wn C(N,i) u^i (v-u)^(N-i) / (wd v^N).
    let parts: Vec<(BigUint, BigUint, BigUint, BigUint)> = atoms
        .iter()
        .map(|a| {
            let (u, v) = (a.p.numer().magnitude().clone(), a.p.denom().magnitude().clone());
            let (wn, wd) = (a.w.numer().magnitude().clone(), a.w.denom().magnitude().clone());
            (u, v, wn, wd)
        })
        .collect();
    let denominator = parts.iter().fold(BigUint::one(), |acc, (_, v, _, wd)| {
        acc.lcm(&(wd * num_traits::pow(v.clone(), n as usize)))
    });
    let len = n as usize + 1;
    let mut numerators = vec![BigUint::zero(); len];
    for (u, v, wn, wd) in &parts {
        let scale = &denominator / (wd * num_traits::pow(v.clone(), n as usize)) * wn;
        if u.is_zero() {
            numerators[0] += scale;
            continue;
        }
        if u == v {
            numerators[len - 1] += scale;
            continue;
        }
        let rest = v - u;
        // t_i = scale C(N,i) u^i (v-u)^(N-i); t_{i+1} = t_i (N-i) u / ((i+1)(v-u)), exactly.
        let mut term = scale * num_traits::pow(rest.clone(), n as usize);
        for i in 0..len {
            numerators[i] += &term;
            if i + 1 < len {
                term *= n - i as u64;
                term *= u;
                term /= i as u64 + 1;
                term /= &rest;
            }
        }
    }
    SampleMeanLaw::from_common_denominator(numerators, denominator)
}

fn log_sample_mean_law(mu: &MixingMeasure, n: u64) -> SampleMeanLaw {
    let table = LogFactorialTable::global();
    let atoms = mu.float_atoms();
    let len = n as usize + 1;
    let mut q = vec![0.0; len];
    for atom in &atoms {
        if atom.p == 0.0 {
            q[0] += atom.w;
            continue;
        }
        if atom.p == 1.0 {
            q[len - 1] += atom.w;
            continue;
        }
        for (i, qi) in q.iter_mut().enumerate() {
            *qi += atom.w * table.log_binomial_pmf(n, i as u64, atom.p).value();
        }
    }
    SampleMeanLaw::from_float_unchecked(q)
}

/// `sum_i a_i q_i`: the prefix probability of the exchangeable law whose
/// count statistic has law `law`.
pub fn prefix_prob_from_mean_law(law: &SampleMeanLaw, e: &PrefixEvent) -> Result<Real> {
    let (n, k, alpha) = (law.n(), e.k(), e.alpha());
    if k > n {
        return Err(Error::domain(format!("prefix length k={k} exceeds N={n}")));
    }
    Ok(match law.weights() {
        LawWeights::Exact(w) => {
            // a_i = (i)_alpha (N-i)_(k-alpha) / (N)_k
            let num = w.dot(0..=n, |i| a_numerator(n, k, alpha, i));
            let den = falling(n, k) * w.denominator();
            Real::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
        }
        LawWeights::Float(q) => {
            let table = LogFactorialTable::global();
            let mut sum = CompensatedSum::new();
            for (i, &qi) in q.iter().enumerate() {
                if qi != 0.0 {
                    sum.add(log_a_unchecked(table, n, k, alpha, i as u64).value() * qi);
                }
            }
            Real::Float(sum.value())
        }
    })
}

/// Wraps a count-probability vector as the law of an exchangeable `(X_1, ..., X_N)`.
pub fn exchangeable_law_from_counts(q: Vec<BigRational>) -> Result<SampleMeanLaw> {
    SampleMeanLaw::from_exact(q)
}

pub fn exchangeable_law_from_counts_f64(q: Vec<f64>) -> Result<SampleMeanLaw> {
    SampleMeanLaw::from_float(q)
}

/// Result of checking that a zero-probability prefix forces `q_i = 0` for `i >= alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SupportCheck {
    /// The prefix has positive probability, so there is nothing to check.
    Vacuous,
    /// The prefix has probability zero and every `q_i` with `i >= alpha` is zero.
    Pass,
    /// The prefix has probability zero but `q_index > 0` for some `index >= alpha`.
    Fail { index: u64 },
}

impl SupportCheck {
    pub fn passed(&self) -> bool {
        !matches!(self, SupportCheck::Fail { .. })
    }
}

/// For a prefix of probability zero, finds the first `i >= alpha` with `q_i > 0`.
///
/// At finite N a failure can only sit at `i > N - k + alpha`, where `a_i = 0`
/// because no arrangement of `i` ones puts `k - alpha` zeros in the prefix.
pub fn support_consistency_check(law: &SampleMeanLaw, e: &PrefixEvent) -> Result<SupportCheck> {
    let prob = prefix_prob_from_mean_law(law, e)?;
    let is_zero = match &prob {
        Real::Exact(r) => r.is_zero(),
        Real::Float(x) => *x < FLOAT_ZERO_PROB,
    };
    if !is_zero {
        return Ok(SupportCheck::Vacuous);
    }
    let alpha = e.alpha();
    Ok(match (alpha..=law.n()).find(|&i| !law.is_weight_zero(i)) {
        Some(index) => SupportCheck::Fail { index },
        None => SupportCheck::Pass,
    })
}
