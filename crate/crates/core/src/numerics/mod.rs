//! Combinatorial primitives behind every other module: binomials, the
//! conditional prefix probability `a_i`, the iid kernel `b_i`, the constant
//! `r`, the ratio factorization and the index regions.

pub mod exact;
pub mod logspace;
pub mod ratio;
pub mod regions;
pub mod sum;

use serde::{Deserialize, Serialize};

pub use exact::binomial;
pub use logspace::{log_binomial, LogFactorialTable, LogValue};
pub use ratio::{ratio_factorization, RatioFactors};
pub use regions::{Region, RegionBounds};
pub use sum::CompensatedSum;

use crate::error::Result;
use crate::value::Probability;

/// Largest N that `Backend::Auto` runs with exact rationals.
pub const AUTO_EXACT_MAX_N: u64 = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Log,
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResolvedBackend {
    Exact,
    Log,
}

impl Backend {
    pub fn resolve(self, n: u64) -> ResolvedBackend {
        match self {
            Backend::Exact => ResolvedBackend::Exact,
            Backend::Log => ResolvedBackend::Log,
            Backend::Auto if n <= AUTO_EXACT_MAX_N => ResolvedBackend::Exact,
            Backend::Auto => ResolvedBackend::Log,
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Backend::Exact),
            "log" => Ok(Backend::Log),
            "auto" => Ok(Backend::Auto),
            other => Err(crate::error::Error::Parse(format!("unknown backend {other:?}"))),
        }
    }
}

/// `a_i` on the chosen backend.
pub fn a_i(n: u64, k: u64, alpha: u64, i: u64, backend: ResolvedBackend) -> Result<Probability> {
    Ok(match backend {
        ResolvedBackend::Exact => Probability::Exact(exact::a_i(n, k, alpha, i)?),
        ResolvedBackend::Log => Probability::Log(logspace::log_a_i(n, k, alpha, i)?),
    })
}

/// `b_i` on the chosen backend.
pub fn b_i(n: u64, k: u64, alpha: u64, i: u64, backend: ResolvedBackend) -> Result<Probability> {
    Ok(match backend {
        ResolvedBackend::Exact => Probability::Exact(exact::b_i(n, k, alpha, i)?),
        ResolvedBackend::Log => Probability::Log(logspace::log_b_i(n, k, alpha, i)?),
    })
}

/// `r = N^k / (N)_k` on the chosen backend.
pub fn r_constant(n: u64, k: u64, backend: ResolvedBackend) -> Result<Probability> {
    Ok(match backend {
        ResolvedBackend::Exact => Probability::Exact(exact::r_constant(n, k)?),
        ResolvedBackend::Log => Probability::Log(logspace::log_r_constant(n, k)?),
    })
}

pub fn region_bounds(n: u64) -> Result<RegionBounds> {
    RegionBounds::new(n)
}
