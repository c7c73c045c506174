//! The law of the sample mean `Y_N = S_N / N` over the grid `{0, 1/N, ..., 1}`.
//!
//! Exact weights share one denominator. At `N = 10^4` a single weight can
//! have a denominator of tens of thousands of bits; reducing each weight
//! separately costs a big gcd per index, while sums against a shared
//! denominator are plain integer arithmetic.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::measure::FLOAT_MASS_TOL;
use crate::value::{rational_to_f64, Real};

/// Weights `q_i = numerators[i] / denominator`, jointly reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactWeights {
    numerators: Vec<BigUint>,
    denominator: BigUint,
}

impl ExactWeights {
    pub fn numerators(&self) -> &[BigUint] {
        &self.numerators
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn weight(&self, i: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerators[i].clone()),
            BigInt::from(self.denominator.clone()),
        )
    }

    /// `sum_i coeff(i) * numerators[i]` over `range`, to be divided by the denominator.
    pub fn dot(&self, range: impl Iterator<Item = u64>, coeff: impl Fn(u64) -> BigUint) -> BigUint {
        let mut acc = BigUint::zero();
        for i in range {
            let num = &self.numerators[i as usize];
            if num.is_zero() {
                continue;
            }
            acc += coeff(i) * num;
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LawWeights {
    Exact(ExactWeights),
    Float(Vec<f64>),
}

/// Distribution of `Y_N`; `q_i = P(Y_N = i/N)`. This is also the sufficient
/// statistic of any exchangeable law of `(X_1, ..., X_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMeanLaw {
    n: u64,
    weights: LawWeights,
}

impl SampleMeanLaw {
    /// Validates `q_i >= 0`, `sum q_i = 1` exactly.
    pub fn from_exact(q: Vec<BigRational>) -> Result<Self> {
        if q.len() < 2 {
            return Err(Error::domain("a sample-mean law needs N >= 1 (at least two weights)"));
        }
        if let Some((i, w)) = q.iter().enumerate().find(|(_, w)| w.is_negative()) {
            return Err(Error::invariant(format!("weight q_{i} = {w} is negative")));
        }
        let denominator = q.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom())).into_parts().1;
        let numerators: Vec<BigUint> = q
            .iter()
            .map(|w| {
                let scale = &denominator / w.denom().magnitude();
                w.numer().magnitude() * scale
            })
            .collect();
        Self::from_common_denominator(numerators, denominator)
    }

    /// Validates `q_i >= 0` and `|sum q_i - 1| <= 1e-12`.
    pub fn from_float(q: Vec<f64>) -> Result<Self> {
        if q.len() < 2 {
            return Err(Error::domain("a sample-mean law needs N >= 1 (at least two weights)"));
        }
        if let Some((i, w)) = q.iter().enumerate().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::invariant(format!(
                "weight q_{i} = {w} is negative or not finite"
            )));
        }
        let total: f64 = q.iter().copied().collect::<crate::numerics::CompensatedSum>().value();
        if (total - 1.0).abs() > FLOAT_MASS_TOL {
            return Err(Error::invariant(format!(
                "weights must sum to 1 within {FLOAT_MASS_TOL:e}, got {total}"
            )));
        }
        Ok(SampleMeanLaw {
            n: q.len() as u64 - 1,
            weights: LawWeights::Float(q),
        })
    }

    /// Numerators over a shared denominator; checks the total mass and reduces.
    pub fn from_common_denominator(numerators: Vec<BigUint>, denominator: BigUint) -> Result<Self> {
        if numerators.len() < 2 {
            return Err(Error::domain("a sample-mean law needs N >= 1 (at least two weights)"));
        }
        let total: BigUint = numerators.iter().sum();
        if total != denominator {
            return Err(Error::invariant(format!(
                "weights must sum to 1, got {}",
                BigRational::new(total.into(), denominator.into())
            )));
        }
        let mut g = denominator.clone();
        for num in &numerators {
            if g.is_one() {
                break;
            }
            if !num.is_zero() {
                g = g.gcd(num);
            }
        }
        let (numerators, denominator) = if g.is_one() {
            (numerators, denominator)
        } else {
            (numerators.into_iter().map(|x| x / &g).collect(), denominator / &g)
        };
        Ok(SampleMeanLaw {
            n: numerators.len() as u64 - 1,
            weights: LawWeights::Exact(ExactWeights {
                numerators,
                denominator,
            }),
        })
    }

    /// Internal constructor for computed float laws; mass is the caller's responsibility.
    pub(crate) fn from_float_unchecked(q: Vec<f64>) -> Self {
        SampleMeanLaw {
            n: q.len() as u64 - 1,
            weights: LawWeights::Float(q),
        }
    }

    /// Point mass at `Y_N = i/N`.
    pub fn point_mass(n: u64, i: u64) -> Result<Self> {
        if i > n {
            return Err(Error::domain(format!("index {i} exceeds N={n}")));
        }
        let mut nums = vec![BigUint::zero(); n as usize + 1];
        nums[i as usize] = BigUint::one();
        Self::from_common_denominator(nums, BigUint::one())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.weights, LawWeights::Exact(_))
    }

    pub fn weights(&self) -> &LawWeights {
        &self.weights
    }

    pub fn exact(&self) -> Option<&ExactWeights> {
        match &self.weights {
            LawWeights::Exact(w) => Some(w),
            LawWeights::Float(_) => None,
        }
    }

    pub fn weight(&self, i: u64) -> Real {
        match &self.weights {
            LawWeights::Exact(w) => Real::Exact(w.weight(i as usize)),
            LawWeights::Float(q) => Real::Float(q[i as usize]),
        }
    }

    pub fn is_weight_zero(&self, i: u64) -> bool {
        match &self.weights {
            LawWeights::Exact(w) => w.numerators[i as usize].is_zero(),
            LawWeights::Float(q) => q[i as usize] == 0.0,
        }
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        match &self.weights {
            LawWeights::Exact(w) => (0..w.numerators.len()).map(|i| rational_to_f64(&w.weight(i))).collect(),
            LawWeights::Float(q) => q.clone(),
        }
    }

    pub fn weights_real(&self) -> Vec<Real> {
        (0..=self.n).map(|i| self.weight(i)).collect()
    }

    pub fn to_float(&self) -> SampleMeanLaw {
        SampleMeanLaw {
            n: self.n,
            weights: LawWeights::Float(self.weights_f64()),
        }
    }
}
