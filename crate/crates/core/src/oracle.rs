//! Brute-force reference over all `2^N` binary words.
//!
//! Word `x` encodes `(X_1, ..., X_N)` with `X_1` in the most significant bit,
//! so words run in lexicographic order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    mixture_prefix_prob, prefix_prob_from_mean_law, sample_mean_law, MixingMeasure, PrefixEvent, SampleMeanLaw,
};
use crate::numerics::{binomial, ResolvedBackend};
use crate::value::{int, Real};

/// Largest word length the oracle enumerates.
pub const MAX_ORACLE_N: u64 = 20;

/// A law on `{0,1}^N` given word by word.
#[derive(Debug, Clone, PartialEq)]
pub struct WordLaw {
    n: u64,
    weights: Vec<BigRational>,
}

fn check_cap(n: u64) -> Result<()> {
    if n == 0 || n > MAX_ORACLE_N {
        return Err(Error::domain(format!(
            "oracle needs 1 <= N <= {MAX_ORACLE_N}, got N={n}"
        )));
    }
    Ok(())
}

impl WordLaw {
    /// Checks nonnegativity and total mass one.
    pub fn new(n: u64, weights: Vec<BigRational>) -> Result<Self> {
        check_cap(n)?;
        if weights.len() != 1 << n {
            return Err(Error::domain(format!(
                "expected {} word weights, got {}",
                1u64 << n,
                weights.len()
            )));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::invariant("word weights must be nonnegative"));
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::invariant(format!("word weights must sum to 1, got {total}")));
        }
        Ok(WordLaw { n, weights })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn weight(&self, word: u32) -> &BigRational {
        &self.weights[word as usize]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// `X_{j+1}` of `word`, for `j` counted from zero.
    pub fn bit(&self, word: u32, j: u64) -> u8 {
        ((word >> (self.n - 1 - j)) & 1) as u8
    }
}

fn by_count(n: u64, count_weight: impl Fn(u64) -> BigRational) -> WordLaw {
    let per_count: Vec<BigRational> = (0..=n).map(count_weight).collect();
    let weights = (0..1u32 << n)
        .map(|w| per_count[w.count_ones() as usize].clone())
        .collect();
    WordLaw { n, weights }
}

/// `weight(word) = sum_atoms w p^ones (1-p)^(N-ones)`.
pub fn word_law_from_mixture(mu: &MixingMeasure, n: u64) -> Result<WordLaw> {
    check_cap(n)?;
    let atoms = mu.require_exact("the word oracle")?;
    let one = BigRational::one();
    Ok(by_count(n, |ones| {
        atoms
            .iter()
            .map(|a| {
                &a.w * num_traits::pow(a.p.clone(), ones as usize) * num_traits::pow(&one - &a.p, (n - ones) as usize)
            })
            .sum()
    }))
}

/// The exchangeable word law whose count statistic is `law`: each of the
/// `C(N, i)` words with `i` ones gets `q_i / C(N, i)`.
pub fn word_law_from_counts(law: &SampleMeanLaw) -> Result<WordLaw> {
    let n = law.n();
    check_cap(n)?;
    let w = law
        .exact()
        .ok_or_else(|| Error::NotExact("the word oracle needs rational weights".into()))?;
    Ok(by_count(n, |i| {
        w.weight(i as usize) / BigRational::from_integer(BigInt::from(binomial(n, i as i64)))
    }))
}

fn check_prefix(law: &WordLaw, e: &PrefixEvent) -> Result<u32> {
    if e.k() > law.n {
        return Err(Error::domain(format!("prefix length k={} exceeds N={}", e.k(), law.n)));
    }
    Ok(e.pattern().iter().fold(0u32, |acc, &b| (acc << 1) | b as u32))
}

/// Total weight of the words starting with the pattern.
pub fn brute_prefix_prob(law: &WordLaw, e: &PrefixEvent) -> Result<BigRational> {
    let prefix = check_prefix(law, e)?;
    let shift = law.n - e.k();
    let start = (prefix as usize) << shift;
    Ok(law.weights[start..start + (1 << shift)].iter().sum())
}

/// `P(prefix | S_N = i)` by direct summation over the words with `i` ones.
pub fn brute_conditional_prefix(law: &WordLaw, e: &PrefixEvent, i: u64) -> Result<BigRational> {
    let prefix = check_prefix(law, e)?;
    let shift = law.n - e.k();
    let mut matching = BigRational::zero();
    let mut total = BigRational::zero();
    for (word, w) in law.weights.iter().enumerate() {
        if word.count_ones() as u64 != i {
            continue;
        }
        total += w;
        if (word >> shift) as u32 == prefix {
            matching += w;
        }
    }
    if total.is_zero() {
        return Err(Error::domain(format!("P(S_N = {i}) = 0; the conditional is undefined")));
    }
    Ok(matching / total)
}

/// Whether the weight of a word depends only on its number of ones.
pub fn is_exchangeable(law: &WordLaw) -> bool {
    let mut seen: Vec<Option<&BigRational>> = vec![None; law.n as usize + 1];
    law.weights.iter().enumerate().all(|(word, w)| {
        let slot = &mut seen[word.count_ones() as usize];
        match slot {
            Some(first) => *first == w,
            None => {
                *slot = Some(w);
                true
            }
        }
    })
}

/// The law of `(X_{perm[0]+1}, ..., X_{perm[N-1]+1})`.
pub fn permute(law: &WordLaw, perm: &[usize]) -> Result<WordLaw> {
    let n = law.n as usize;
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::domain(format!("{perm:?} is not a permutation of 0..{n}")));
    }
    let mut weights = vec![BigRational::zero(); law.weights.len()];
    for (word, w) in law.weights.iter().enumerate() {
        let mut image = 0u32;
        for (j, &src) in perm.iter().enumerate() {
            let bit = law.bit(word as u32, src as u64) as u32;
            image |= bit << (n - 1 - j);
        }
        weights[image as usize] += w;
    }
    Ok(WordLaw { n: law.n, weights })
}

/// A small random rational measure: 1 to 4 atoms at `a/d` with `d <= 12`
/// and positive integer weights normalized to one.
pub fn random_rational_measure(rng: &mut impl Rng) -> MixingMeasure {
    let atoms = rng.gen_range(1..=4);
    let raw: Vec<(BigRational, u64)> = (0..atoms)
        .map(|_| {
            let d = rng.gen_range(1..=12u64);
            let a = rng.gen_range(0..=d);
            (int(a) / int(d), rng.gen_range(1..=9u64))
        })
        .collect();
    let total: u64 = raw.iter().map(|(_, w)| w).sum();
    MixingMeasure::exact(raw.into_iter().map(|(p, w)| (p, int(w) / int(total))).collect())
        .expect("normalized by construction")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub seed: u64,
    pub measures: usize,
    /// Number of (measure, pattern) triples compared.
    pub comparisons: u64,
    /// Largest pairwise gap among the three prefix-probability routes.
    pub max_abs_gap: Real,
    pub all_exchangeable: bool,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.max_abs_gap.is_zero() && self.all_exchangeable
    }
}

/// For `measures` seeded random measures and every pattern of every length
/// `k <= N`, compares the brute-force word sum, the mixture formula and
/// `sum a_i q_i` with exact arithmetic.
pub fn oracle_sweep(n: u64, seed: u64, measures: usize) -> Result<OracleReport> {
    check_cap(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_gap = BigRational::zero();
    let mut comparisons = 0;
    let mut all_exchangeable = true;
    for _ in 0..measures {
        let mu = random_rational_measure(&mut rng);
        let words = word_law_from_mixture(&mu, n)?;
        all_exchangeable &= is_exchangeable(&words);
        let law = sample_mean_law(&mu, n, ResolvedBackend::Exact)?;
        for k in 1..=n {
            for e in PrefixEvent::all_of_length(k as u32) {
                let brute = brute_prefix_prob(&words, &e)?;
                let mixture = mixture_prefix_prob(&mu, &e);
                let mixture = mixture.as_exact().expect("exact measure");
                let Real::Exact(from_law) = prefix_prob_from_mean_law(&law, &e)? else {
                    unreachable!("exact law")
                };
                for gap in [
                    (&brute - mixture).abs(),
                    (&brute - &from_law).abs(),
                    (mixture - &from_law).abs(),
                ] {
                    if gap > max_gap {
                        max_gap = gap;
                    }
                }
                comparisons += 1;
            }
        }
    }
    Ok(OracleReport {
        n,
        seed,
        measures,
        comparisons,
        max_abs_gap: Real::Exact(max_gap),
        all_exchangeable,
    })
}
