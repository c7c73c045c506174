//! Recovering the mixing measure as the law of the sample mean at a finite
//! level, and measuring how close such a law is to a target measure.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::model::{mean_law_from_moments, LawWeights, MixingMeasure, MomentVector, SampleMeanLaw};
use crate::numerics::exact::pow;
use crate::numerics::CompensatedSum;
use crate::value::{ratio_of, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoverySource {
    Moments,
    MeanLaw,
}

/// The law of `Y_n` read as a measure with atoms at `i/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredMeasure {
    pub measure: MixingMeasure,
    pub law: SampleMeanLaw,
    pub source: RecoverySource,
    pub level: u64,
}

/// Inverts the moments at level `n`; a vector that is not `n`-extendable is
/// rejected with the certificate of the first negative weight.
pub fn recover_from_moments(c: &MomentVector, n: usize) -> Result<RecoveredMeasure> {
    let law = mean_law_from_moments(c, n)?;
    Ok(RecoveredMeasure {
        measure: MixingMeasure::from_mean_law(&law),
        level: n as u64,
        law,
        source: RecoverySource::Moments,
    })
}

pub fn recover_from_law(law: &SampleMeanLaw) -> RecoveredMeasure {
    RecoveredMeasure {
        measure: MixingMeasure::from_mean_law(law),
        law: law.clone(),
        source: RecoverySource::MeanLaw,
        level: law.n(),
    }
}

/// A continuous function on `[0, 1]` used to probe weak convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// `p^m`
    Monomial { m: u64 },
    /// `p^alpha (1-p)^(k-alpha)`
    Kernel { k: u64, alpha: u64 },
}

impl TestFunction {
    pub fn name(&self) -> String {
        match *self {
            TestFunction::Monomial { m } => format!("p^{m}"),
            TestFunction::Kernel { k, alpha } => format!("p^{alpha}(1-p)^{}", k - alpha),
        }
    }

    fn eval_exact(&self, p: &BigRational) -> BigRational {
        let one = BigRational::from_integer(1.into());
        match *self {
            TestFunction::Monomial { m } => num_traits::pow(p.clone(), m as usize),
            TestFunction::Kernel { k, alpha } => {
                num_traits::pow(p.clone(), alpha as usize) * num_traits::pow(one - p, (k - alpha) as usize)
            }
        }
    }

    fn eval_f64(&self, p: f64) -> f64 {
        match *self {
            TestFunction::Monomial { m } => p.powi(m as i32),
            TestFunction::Kernel { k, alpha } => p.powi(alpha as i32) * (1.0 - p).powi((k - alpha) as i32),
        }
    }

    /// `f(i/N) N^deg` as an integer, and `deg`.
    fn grid_numerator(&self, n: u64, i: u64) -> (BigUint, u64) {
        match *self {
            TestFunction::Monomial { m } => (pow(i, m), m),
            TestFunction::Kernel { k, alpha } => (pow(i, alpha) * pow(n - i, k - alpha), k),
        }
    }
}

impl Serialize for TestFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionGap {
    pub function: TestFunction,
    pub law_value: Real,
    pub target_value: Real,
    pub gap: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakConvergenceDiagnostic {
    #[serde(rename = "N")]
    pub n: u64,
    pub gaps: Vec<FunctionGap>,
}

impl WeakConvergenceDiagnostic {
    pub fn gap(&self, f: TestFunction) -> Option<&Real> {
        self.gaps.iter().find(|g| g.function == f).map(|g| &g.gap)
    }

    pub fn monomial_gap(&self, m: u64) -> Option<&Real> {
        self.gap(TestFunction::Monomial { m })
    }
}

/// The probes for a given `k_max`: `p^m` for `m <= k_max`, then every kernel
/// with `1 <= k <= k_max`.
pub fn test_functions(k_max: u64) -> Vec<TestFunction> {
    let mut fs: Vec<TestFunction> = (0..=k_max).map(|m| TestFunction::Monomial { m }).collect();
    for k in 1..=k_max {
        for alpha in 0..=k {
            fs.push(TestFunction::Kernel { k, alpha });
        }
    }
    fs
}

/// `|sum_i f(i/N) q_i - E_target[f]|` for each probe. Exact when both inputs are.
pub fn weak_convergence_gap(law: &SampleMeanLaw, target: &MixingMeasure, k_max: u64) -> WeakConvergenceDiagnostic {
    let n = law.n();
    let gaps = test_functions(k_max)
        .into_iter()
        .map(|f| match (law.weights(), target.exact_atoms()) {
            (LawWeights::Exact(w), Some(_)) => {
                let (num, deg) = (w.dot(0..=n, |i| f.grid_numerator(n, i).0), f.grid_numerator(n, 0).1);
                let law_value = ratio_of(num, pow(n, deg) * w.denominator());
                let target_value = target.expect_exact(|p| f.eval_exact(p)).expect("exact target");
                let gap = (&law_value - &target_value).abs();
                FunctionGap {
                    function: f,
                    law_value: Real::Exact(law_value),
                    target_value: Real::Exact(target_value),
                    gap: Real::Exact(gap),
                }
            }
            _ => {
                let q = law.weights_f64();
                let law_value = q
                    .iter()
                    .enumerate()
                    .filter(|(_, &qi)| qi != 0.0)
                    .map(|(i, &qi)| f.eval_f64(i as f64 / n as f64) * qi)
                    .collect::<CompensatedSum>()
                    .value();
                let target_value = target.expect_f64(|p| f.eval_f64(p));
                FunctionGap {
                    function: f,
                    law_value: Real::Float(law_value),
                    target_value: Real::Float(target_value),
                    gap: Real::Float((law_value - target_value).abs()),
                }
            }
        })
        .collect();
    WeakConvergenceDiagnostic { n, gaps }
}

/// `sup_x |F_a(x) - F_b(x)|` for right-continuous CDFs. Both are step
/// functions jumping only at atoms, so the sup is attained on the merged
/// atom grid. Exact when both measures are.
pub fn cdf_distance(a: &MixingMeasure, b: &MixingMeasure) -> Real {
    match (a.exact_atoms(), b.exact_atoms()) {
        (Some(xa), Some(xb)) => {
            let xa: Vec<(&BigRational, &BigRational)> = xa.iter().map(|t| (&t.p, &t.w)).collect();
            let xb: Vec<(&BigRational, &BigRational)> = xb.iter().map(|t| (&t.p, &t.w)).collect();
            Real::Exact(merged_sup(&xa, &xb, |x, y| x.cmp(y), BigRational::zero()))
        }
        _ => {
            let (fa, fb) = (a.float_atoms(), b.float_atoms());
            let xa: Vec<(&f64, &f64)> = fa.iter().map(|t| (&t.p, &t.w)).collect();
            let xb: Vec<(&f64, &f64)> = fb.iter().map(|t| (&t.p, &t.w)).collect();
            Real::Float(merged_sup(&xa, &xb, |x, y| x.total_cmp(y), 0.0))
        }
    }
}

fn merged_sup<T>(a: &[(&T, &T)], b: &[(&T, &T)], cmp: impl Fn(&T, &T) -> Ordering, zero: T) -> T
where
    T: Clone + PartialOrd + Signed,
    for<'x> &'x T: std::ops::Add<&'x T, Output = T>,
{
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (zero.clone(), zero.clone());
    let mut best = zero;
    while i < a.len() || j < b.len() {
        // next grid point, consuming every atom located there
        let order = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => cmp(x.0, y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        if order != Ordering::Greater {
            fa = &fa + a[i].1;
            i += 1;
        }
        if order != Ordering::Less {
            fb = &fb + b[j].1;
            j += 1;
        }
        let d = (fa.clone() - fb.clone()).abs();
        if d > best {
            best = d;
        }
    }
    best
}

/// `c'_j = sum_i (i/n)^j q_i` for `j = 0..=order`: the moments of a recovered measure.
pub fn moments_of_law(law: &SampleMeanLaw, order: u64) -> Vec<Real> {
    let n = law.n();
    (0..=order)
        .map(|j| match law.weights() {
            LawWeights::Exact(w) => Real::Exact(BigRational::new(
                BigInt::from(w.dot(0..=n, |i| pow(i, j))),
                BigInt::from(pow(n, j) * w.denominator()),
            )),
            LawWeights::Float(q) => Real::Float(
                q.iter()
                    .enumerate()
                    .map(|(i, qi)| (i as f64 / n as f64).powi(j as i32) * qi)
                    .collect::<CompensatedSum>()
                    .value(),
            ),
        })
        .collect()
}
