//! Finite-N machinery for exchangeable 0/1 sequences and their mixture
//! representation.
//!
//! The crate computes mixture prefix probabilities, the law of the sample
//! mean, the ratio between the hypergeometric conditional `a_i` and the iid
//! kernel `b_i`, an explicit error budget for `sum a_i q_i - sum b_i q_i`,
//! and recovers mixing measures from moment sequences. Every computation has
//! an exact rational backend and a log-space backend for large N.

pub mod error;
pub mod harness;
pub mod io;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod recovery;
pub mod value;

pub use error::{Error, ExtendabilityCertificate, Result};
pub use model::{MixingMeasure, MomentVector, PrefixEvent, SampleMeanLaw};
pub use numerics::{Backend, RegionBounds, ResolvedBackend};
pub use value::{Probability, Real};
