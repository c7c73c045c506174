//! Moment sequences `c_j = P(X_1 = ... = X_j = 1) = E[p^j]` and their
//! inversion to laws of `S_n` by inclusion-exclusion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, ExtendabilityCertificate, Result};
use crate::model::law::SampleMeanLaw;
use crate::model::measure::MixingMeasure;
use crate::model::prefix::PrefixEvent;
use crate::numerics::exact::binomial;
use crate::numerics::CompensatedSum;
use crate::value::{int, Real};

/// Float inclusion-exclusion results whose estimated relative rounding error exceeds this are flagged.
pub const CANCELLATION_FLAG: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
enum Moments {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// `c_0, ..., c_n` with `c_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    c: Moments,
}

impl MomentVector {
    pub fn exact(c: Vec<BigRational>) -> Result<Self> {
        match c.first() {
            Some(c0) if c0.is_one() => Ok(MomentVector { c: Moments::Exact(c) }),
            Some(c0) => Err(Error::invariant(format!("c_0 must be 1, got {c0}"))),
            None => Err(Error::invariant("moment vector is empty")),
        }
    }

    pub fn float(c: Vec<f64>) -> Result<Self> {
        if let Some(bad) = c.iter().find(|x| !x.is_finite()) {
            return Err(Error::invariant(format!("moment {bad} is not finite")));
        }
        match c.first() {
            Some(&c0) if c0 == 1.0 => Ok(MomentVector { c: Moments::Float(c) }),
            Some(c0) => Err(Error::invariant(format!("c_0 must be 1, got {c0}"))),
            None => Err(Error::invariant("moment vector is empty")),
        }
    }

    /// Moments of the uniform mixing law, `c_j = 1/(j+1)`.
    pub fn uniform(n: usize) -> Self {
        let c = (0..=n as u64).map(|j| int(1) / int(j + 1)).collect();
        MomentVector { c: Moments::Exact(c) }
    }

    /// Highest index `n` available.
    pub fn order(&self) -> usize {
        self.len() - 1
    }

    pub fn len(&self) -> usize {
        match &self.c {
            Moments::Exact(c) => c.len(),
            Moments::Float(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.c, Moments::Exact(_))
    }

    pub fn get(&self, j: usize) -> Real {
        match &self.c {
            Moments::Exact(c) => Real::Exact(c[j].clone()),
            Moments::Float(c) => Real::Float(c[j]),
        }
    }

    pub fn values(&self) -> Vec<Real> {
        (0..self.len()).map(|j| self.get(j)).collect()
    }

    pub fn exact_values(&self) -> Option<&[BigRational]> {
        match &self.c {
            Moments::Exact(c) => Some(c),
            Moments::Float(_) => None,
        }
    }
}

/// `c_j = sum_atoms w p^j` for `j = 0..=n`.
pub fn moments_from_measure(mu: &MixingMeasure, n: usize) -> MomentVector {
    match mu.exact_atoms() {
        Some(atoms) => {
            let mut c = vec![BigRational::zero(); n + 1];
            for atom in atoms {
                let mut pw = BigRational::one();
                for cj in c.iter_mut() {
                    *cj += &atom.w * &pw;
                    pw *= &atom.p;
                }
            }
            MomentVector { c: Moments::Exact(c) }
        }
        None => {
            let atoms = mu.float_atoms();
            let c = (0..=n as i32)
                .map(|j| {
                    atoms
                        .iter()
                        .map(|a| a.w * a.p.powi(j))
                        .collect::<CompensatedSum>()
                        .value()
                })
                .collect();
            MomentVector { c: Moments::Float(c) }
        }
    }
}

/// `sum_t (-1)^t C(m, t) c_{j+t}`, i.e. `(-1)^m Delta^m c_j`.
fn alternating_difference(c: &[BigRational], j: usize, m: usize) -> BigRational {
    let mut acc = BigRational::zero();
    for t in 0..=m {
        let term = BigRational::from_integer(BigInt::from(binomial(m as u64, t as i64))) * &c[j + t];
        if t % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn alternating_difference_f64(c: &[f64], j: usize, m: usize) -> CompensatedSum {
    let mut acc = CompensatedSum::new();
    let mut coeff = 1.0f64;
    for t in 0..=m {
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * coeff * c[j + t]);
        coeff = coeff * (m - t) as f64 / (t + 1) as f64;
    }
    acc
}

/// Float inversion result, with the indices where cancellation was severe.
#[derive(Debug, Clone)]
pub struct InversionDiagnostics {
    pub law: SampleMeanLaw,
    /// Indices `j` whose estimated relative error exceeds [`CANCELLATION_FLAG`].
    pub ill_conditioned: Vec<usize>,
}

fn check_length(c: &MomentVector, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("level n must be positive"));
    }
    if c.len() < n + 1 {
        return Err(Error::domain(format!(
            "level {n} needs moments c_0..c_{n}, only {} given",
            c.len()
        )));
    }
    Ok(())
}

/// The law of `S_n` implied by the moments:
/// `q_j = C(n, j) sum_{t=0}^{n-j} (-1)^t C(n-j, t) c_{j+t}`.
///
/// Fails with a certificate naming the first negative `q_j`.
pub fn mean_law_from_moments(c: &MomentVector, n: usize) -> Result<SampleMeanLaw> {
    mean_law_from_moments_detailed(c, n).map(|d| d.law)
}

pub fn mean_law_from_moments_detailed(c: &MomentVector, n: usize) -> Result<InversionDiagnostics> {
    check_length(c, n)?;
    match &c.c {
        Moments::Exact(values) => {
            let mut q = Vec::with_capacity(n + 1);
            for j in 0..=n {
                let diff = alternating_difference(values, j, n - j);
                let qj = BigRational::from_integer(BigInt::from(binomial(n as u64, j as i64))) * diff;
                if qj.is_negative() {
                    return Err(Error::NotExtendable(ExtendabilityCertificate {
                        level: n,
                        index: j,
                        order: n - j,
                        value: qj,
                    }));
                }
                q.push(qj);
            }
            Ok(InversionDiagnostics {
                law: SampleMeanLaw::from_exact(q)?,
                ill_conditioned: vec![],
            })
        }
        Moments::Float(values) => {
            let mut q = Vec::with_capacity(n + 1);
            let mut ill_conditioned = Vec::new();
            for j in 0..=n {
                let diff = alternating_difference_f64(values, j, n - j);
                let scale = binomial_f64(n, j);
                let qj = scale * diff.value();
                let err = 4.0 * f64::EPSILON * scale * diff.magnitude();
                if qj < -err {
                    return Err(Error::NotExtendable(ExtendabilityCertificate {
                        level: n,
                        index: j,
                        order: n - j,
                        value: BigRational::from_float(qj).expect("finite"),
                    }));
                }
                if qj.abs() > 0.0 && err / qj.abs() > CANCELLATION_FLAG || qj.abs() == 0.0 && err > 0.0 {
                    ill_conditioned.push(j);
                }
                q.push(qj.max(0.0));
            }
            let total: f64 = q.iter().copied().collect::<CompensatedSum>().value();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::invariant(format!("inverted weights sum to {total}")));
            }
            Ok(InversionDiagnostics {
                law: SampleMeanLaw::from_float_unchecked(q),
                ill_conditioned,
            })
        }
    }
}

fn binomial_f64(n: usize, j: usize) -> f64 {
    crate::numerics::log_binomial(n as u64, j as i64).value().round()
}

/// Outcome of the complete-monotonicity test.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum MonotonicityVerdict {
    Accept {
        levels: usize,
    },
    Reject {
        level: usize,
        index: usize,
        order: usize,
        value: Real,
    },
}

impl MonotonicityVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, MonotonicityVerdict::Accept { .. })
    }
}

/// Checks `(-1)^m Delta^m c_j >= 0` for all `m + j <= n`, level by level
/// (level `m + j`), reporting the first negative difference.
pub fn check_complete_monotonicity(c: &MomentVector) -> MonotonicityVerdict {
    let n = c.order();
    match &c.c {
        Moments::Exact(values) => {
            for level in 1..=n {
                for j in 0..=level {
                    let d = alternating_difference(values, j, level - j);
                    if d.is_negative() {
                        return MonotonicityVerdict::Reject {
                            level,
                            index: j,
                            order: level - j,
                            value: Real::Exact(d),
                        };
                    }
                }
            }
        }
        Moments::Float(values) => {
            for level in 1..=n {
                for j in 0..=level {
                    let d = alternating_difference_f64(values, j, level - j);
                    if d.value() < -4.0 * f64::EPSILON * d.magnitude() {
                        return MonotonicityVerdict::Reject {
                            level,
                            index: j,
                            order: level - j,
                            value: Real::Float(d.value()),
                        };
                    }
                }
            }
        }
    }
    MonotonicityVerdict::Accept { levels: n }
}

/// `P(prefix) = sum_t (-1)^t C(k-alpha, t) c_{alpha+t}`.
pub fn prefix_prob_from_moments(c: &MomentVector, e: &PrefixEvent) -> Result<Real> {
    let (k, alpha) = (e.k() as usize, e.alpha() as usize);
    if c.len() < k + 1 {
        return Err(Error::domain(format!(
            "pattern of length {k} needs moments up to c_{k}"
        )));
    }
    Ok(match &c.c {
        Moments::Exact(values) => Real::Exact(alternating_difference(values, alpha, k - alpha)),
        Moments::Float(values) => Real::Float(alternating_difference_f64(values, alpha, k - alpha).value()),
    })
}
