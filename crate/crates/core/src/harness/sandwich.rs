//! Termwise ratio bounds pass to sums: if `|alpha_j / beta_j - 1| <= eps`
//! for every term then `(1 - eps) sum beta <= sum alpha <= (1 + eps) sum beta`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::value::Real;

/// Scalars the sandwich can run on. Floats get a small relative slack when
/// checking the termwise precondition; rationals get none.
pub trait SandwichScalar: Clone + PartialOrd + Signed + std::fmt::Display {
    fn slack() -> Self;
    fn into_real(self) -> Real;
}

impl SandwichScalar for BigRational {
    fn slack() -> Self {
        BigRational::zero()
    }

    fn into_real(self) -> Real {
        Real::Exact(self)
    }
}

/// Relative slack for float termwise checks.
pub const FLOAT_SANDWICH_SLACK: f64 = 1e-12;

impl SandwichScalar for f64 {
    fn slack() -> Self {
        FLOAT_SANDWICH_SLACK
    }

    fn into_real(self) -> Real {
        Real::Float(self)
    }
}

/// The two-sided bound on `sum alpha` certified from the termwise condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichCertificate<T> {
    pub sum_alpha: T,
    pub sum_beta: T,
    pub low: T,
    pub high: T,
}

impl<T: SandwichScalar> SandwichCertificate<T> {
    pub fn contains_sum(&self) -> bool {
        let pad = T::slack() * self.sum_beta.clone();
        self.low.clone() - pad.clone() <= self.sum_alpha && self.sum_alpha <= self.high.clone() + pad
    }

    pub fn to_report(&self) -> SandwichReport {
        SandwichReport {
            sum_alpha: self.sum_alpha.clone().into_real(),
            sum_beta: self.sum_beta.clone().into_real(),
            low: self.low.clone().into_real(),
            high: self.high.clone().into_real(),
            contains: self.contains_sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub sum_alpha: Real,
    pub sum_beta: Real,
    pub low: Real,
    pub high: Real,
    pub contains: bool,
}

/// Checks the termwise precondition and returns `[(1-eps) sum beta, (1+eps) sum beta]`.
pub fn sandwich_bound<T: SandwichScalar>(alpha: &[T], beta: &[T], eps: &T) -> Result<SandwichCertificate<T>> {
    if alpha.len() != beta.len() {
        return Err(Error::domain(format!(
            "term vectors differ in length: {} vs {}",
            alpha.len(),
            beta.len()
        )));
    }
    sandwich_bound_iter(alpha.iter().cloned().zip(beta.iter().cloned()), eps)
}

/// Streaming form of [`sandwich_bound`] over `(alpha_j, beta_j)` pairs.
pub fn sandwich_bound_iter<T: SandwichScalar>(
    terms: impl IntoIterator<Item = (T, T)>,
    eps: &T,
) -> Result<SandwichCertificate<T>> {
    let zero = T::zero();
    if eps.is_negative() {
        return Err(Error::domain(format!("eps must be nonnegative, got {eps}")));
    }
    let mut sum_alpha = T::zero();
    let mut sum_beta = T::zero();
    for (j, (a, b)) in terms.into_iter().enumerate() {
        if a < zero || b < zero {
            return Err(Error::domain(format!("term {j} is negative: alpha={a}, beta={b}")));
        }
        if b.is_zero() {
            if !a.is_zero() {
                return Err(Error::invariant(format!(
                    "term {j}: alpha={a} is positive where beta is 0"
                )));
            }
            continue;
        }
        let allowed = (eps.clone() + T::slack()) * b.clone();
        if (a.clone() - b.clone()).abs() > allowed {
            return Err(Error::invariant(format!(
                "term {j}: ratio alpha/beta = {a}/{b} is outside 1 +- {eps}"
            )));
        }
        sum_alpha = sum_alpha + a;
        sum_beta = sum_beta + b;
    }
    let low = (T::one() - eps.clone()) * sum_beta.clone();
    let high = (T::one() + eps.clone()) * sum_beta.clone();
    Ok(SandwichCertificate {
        sum_alpha,
        sum_beta,
        low,
        high,
    })
}

/// Exact sandwich for nonnegative integer terms sharing the denominator
/// `common`. Works on integers throughout: reducing a rational with tens of
/// thousands of bits costs a gcd per operation.
pub(crate) fn sandwich_bound_integers(
    terms: impl IntoIterator<Item = (BigUint, BigUint)>,
    common: &BigUint,
    eps: &BigRational,
) -> Result<SandwichCertificate<BigRational>> {
    if eps.is_negative() {
        return Err(Error::domain(format!("eps must be nonnegative, got {eps}")));
    }
    let eps_num = eps.numer().magnitude();
    let eps_den = eps.denom().magnitude();
    let mut sum_alpha = BigUint::zero();
    let mut sum_beta = BigUint::zero();
    for (j, (a, b)) in terms.into_iter().enumerate() {
        if b.is_zero() {
            if !a.is_zero() {
                return Err(Error::invariant(format!("term {j}: alpha is positive where beta is 0")));
            }
            continue;
        }
        let gap = if a >= b { &a - &b } else { &b - &a };
        if gap * eps_den > eps_num * &b {
            return Err(Error::invariant(format!(
                "term {j}: ratio alpha/beta is outside 1 +- {eps}"
            )));
        }
        sum_alpha += a;
        sum_beta += b;
    }
    let common = BigRational::from_integer(BigInt::from(common.clone()));
    let sum_alpha = BigRational::from_integer(BigInt::from(sum_alpha)) / &common;
    let sum_beta = BigRational::from_integer(BigInt::from(sum_beta)) / &common;
    let one = BigRational::from_integer(1.into());
    Ok(SandwichCertificate {
        low: (&one - eps) * &sum_beta,
        high: (&one + eps) * &sum_beta,
        sum_alpha,
        sum_beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn equal_terms_give_tight_bound() {
        let v = vec![q("1"), q("2"), q("3")];
        let cert = sandwich_bound(&v, &v, &q("0")).unwrap();
        assert_eq!(cert.low, q("6"));
        assert_eq!(cert.high, q("6"));
        assert!(cert.contains_sum());
    }

    #[test]
    fn float_bound_contains_sum() {
        let cert = sandwich_bound(&[1.01, 1.99], &[1.0, 2.0], &0.01).unwrap();
        assert!((cert.low - 0.99 * 3.0).abs() < 1e-12);
        assert!((cert.high - 1.01 * 3.0).abs() < 1e-12);
        assert!(cert.contains_sum());
        assert!((cert.sum_alpha - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_violating_terms() {
        assert!(sandwich_bound(&[1.1], &[1.0], &0.01).is_err());
        assert!(sandwich_bound(&[q("1/2")], &[q("0")], &q("1")).is_err());
        assert!(sandwich_bound(&[q("-1")], &[q("1")], &q("3")).is_err());
        assert!(sandwich_bound(&[1.0], &[1.0], &-0.1).is_err());
        assert!(sandwich_bound(&[1.0, 2.0], &[1.0], &0.1).is_err());
    }

    #[test]
    fn integer_form_matches_rational_form() {
        let a = [3u32, 5, 0, 9];
        let b = [3u32, 4, 0, 10];
        let eps = q("1/4");
        let ints = sandwich_bound_integers(
            a.iter().zip(&b).map(|(&x, &y)| (BigUint::from(x), BigUint::from(y))),
            &BigUint::from(7u32),
            &eps,
        )
        .unwrap();
        let rats: Vec<BigRational> = a.iter().map(|&x| q(&format!("{x}/7"))).collect();
        let ratb: Vec<BigRational> = b.iter().map(|&x| q(&format!("{x}/7"))).collect();
        assert_eq!(ints, sandwich_bound(&rats, &ratb, &eps).unwrap());
        assert!(
            sandwich_bound_integers([(BigUint::from(2u32), BigUint::from(1u32))], &BigUint::from(1u32), &eps).is_err()
        );
    }
}
