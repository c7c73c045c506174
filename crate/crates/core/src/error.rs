use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

/// Witness that a moment vector has no exchangeable extension at some level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendabilityCertificate {
    /// Level `n` at which the implied law of `S_n` has a negative weight.
    pub level: usize,
    /// Index `j` of the offending weight `q_j` (equivalently of `c_j`).
    pub index: usize,
    /// Order `m = level - index` of the alternating difference.
    pub order: usize,
    /// The negative value itself.
    pub value: BigRational,
}

impl fmt::Display for ExtendabilityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "level {}: (-1)^{} difference of order {} at j={} is {}",
            self.level, self.order, self.order, self.index, self.value
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside an operation's domain (k > N, N < 8, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input text: bad rational literal, bad pattern, bad JSON.
    #[error("parse error: {0}")]
    Parse(String),

    /// A structural invariant does not hold (weights not summing to one, ratio above r, ...).
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// The moment vector is not extendable at the certificate's level.
    #[error("moment vector is not extendable: {0}")]
    NotExtendable(ExtendabilityCertificate),

    /// The operation needs exact rational inputs but got floating-point ones.
    #[error("exact backend requires rational inputs: {0}")]
    NotExact(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for this error: 2 input/domain, 3 invariant, 4 not extendable.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse(_) | Error::NotExact(_) => 2,
            Error::Invariant(_) => 3,
            Error::NotExtendable(_) => 4,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
