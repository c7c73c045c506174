use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::law::{LawWeights, SampleMeanLaw};
use crate::value::{ratio_of, rational_to_f64, Real};

/// Float weights must sum to one within this tolerance.
pub const FLOAT_MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub p: T,
    pub w: T,
}

#[derive(Debug, Clone, PartialEq)]
enum Atoms {
    Exact(Vec<Atom<BigRational>>),
    Float(Vec<Atom<f64>>),
}

/// A discrete probability measure on `[0, 1]`: the mixing law over coin biases.
///
/// Atoms are kept sorted by location with duplicates merged, every weight is
/// positive, and the weights sum to one (exactly, or within
/// [`FLOAT_MASS_TOL`] for float atoms).
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMeasure {
    atoms: Atoms,
}

impl MixingMeasure {
    pub fn exact(atoms: Vec<(BigRational, BigRational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invariant("mixing measure needs at least one atom"));
        }
        let mut total = BigRational::zero();
        for (p, w) in &atoms {
            if p.is_negative() || p > &BigRational::one() {
                return Err(Error::invariant(format!("atom location {p} outside [0, 1]")));
            }
            if !w.is_positive() {
                return Err(Error::invariant(format!("atom weight {w} is not positive")));
            }
            total += w;
        }
        if !total.is_one() {
            return Err(Error::invariant(format!("weights must sum to 1, got {total}")));
        }
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<Atom<BigRational>> = Vec::with_capacity(sorted.len());
        for (p, w) in sorted {
            match merged.last_mut() {
                Some(last) if last.p == p => last.w += w,
                _ => merged.push(Atom { p, w }),
            }
        }
        Ok(MixingMeasure {
            atoms: Atoms::Exact(merged),
        })
    }

    pub fn float(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invariant("mixing measure needs at least one atom"));
        }
        let mut total = 0.0;
        for &(p, w) in &atoms {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invariant(format!("atom location {p} outside [0, 1]")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invariant(format!("atom weight {w} is not positive")));
            }
            total += w;
        }
        if (total - 1.0).abs() > FLOAT_MASS_TOL {
            return Err(Error::invariant(format!(
                "weights must sum to 1 within {FLOAT_MASS_TOL:e}, got {total}"
            )));
        }
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<Atom<f64>> = Vec::with_capacity(sorted.len());
        for (p, w) in sorted {
            match merged.last_mut() {
                Some(last) if last.p == p => last.w += w,
                _ => merged.push(Atom { p, w }),
            }
        }
        Ok(MixingMeasure {
            atoms: Atoms::Float(merged),
        })
    }

    /// Atoms at `i/N` carrying the positive weights of `law`; zero weights are dropped.
    pub fn from_mean_law(law: &SampleMeanLaw) -> Self {
        let n = law.n();
        let atoms = match law.weights() {
            LawWeights::Exact(w) => Atoms::Exact(
                (0..=n)
                    .filter(|&i| !w.numerators()[i as usize].is_zero())
                    .map(|i| Atom {
                        p: ratio_of(BigUint::from(i), BigUint::from(n)),
                        w: w.weight(i as usize),
                    })
                    .collect(),
            ),
            LawWeights::Float(q) => Atoms::Float(
                (0..=n)
                    .filter(|&i| q[i as usize] > 0.0)
                    .map(|i| Atom {
                        p: i as f64 / n as f64,
                        w: q[i as usize],
                    })
                    .collect(),
            ),
        };
        MixingMeasure { atoms }
    }

    pub fn point_mass(p: BigRational) -> Result<Self> {
        Self::exact(vec![(p, BigRational::one())])
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.atoms, Atoms::Exact(_))
    }

    pub fn len(&self) -> usize {
        match &self.atoms {
            Atoms::Exact(a) => a.len(),
            Atoms::Float(a) => a.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn exact_atoms(&self) -> Option<&[Atom<BigRational>]> {
        match &self.atoms {
            Atoms::Exact(a) => Some(a),
            Atoms::Float(_) => None,
        }
    }

    pub(crate) fn require_exact(&self, what: &str) -> Result<&[Atom<BigRational>]> {
        self.exact_atoms()
            .ok_or_else(|| Error::NotExact(format!("{what} needs a measure with rational atoms")))
    }

    /// Atoms as `f64`, converting rational ones.
    pub fn float_atoms(&self) -> Vec<Atom<f64>> {
        match &self.atoms {
            Atoms::Exact(a) => a
                .iter()
                .map(|atom| Atom {
                    p: rational_to_f64(&atom.p),
                    w: rational_to_f64(&atom.w),
                })
                .collect(),
            Atoms::Float(a) => a.clone(),
        }
    }

    /// Atoms as backend-tagged reals (for serialization).
    pub fn atoms(&self) -> Vec<Atom<Real>> {
        match &self.atoms {
            Atoms::Exact(a) => a
                .iter()
                .map(|atom| Atom {
                    p: Real::Exact(atom.p.clone()),
                    w: Real::Exact(atom.w.clone()),
                })
                .collect(),
            Atoms::Float(a) => a
                .iter()
                .map(|atom| Atom {
                    p: Real::Float(atom.p),
                    w: Real::Float(atom.w),
                })
                .collect(),
        }
    }

    /// Expectation of `f(p)` under the measure.
    pub fn expect_exact(&self, f: impl Fn(&BigRational) -> BigRational) -> Option<BigRational> {
        self.exact_atoms().map(|atoms| {
            atoms
                .iter()
                .map(|a| &a.w * f(&a.p))
                .fold(BigRational::zero(), |s, x| s + x)
        })
    }

    pub fn expect_f64(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.float_atoms()
            .iter()
            .map(|a| a.w * f(a.p))
            .collect::<crate::numerics::CompensatedSum>()
            .value()
    }
}
