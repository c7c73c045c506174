use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest N for which the lower, middle and upper index regions are disjoint and nonempty.
pub const MIN_REGION_N: u64 = 8;

/// Which part of `0..=N` an index falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// `i <= M1`
    Lower,
    /// `M1 < i <= M2`
    Mid,
    /// `i > M2`
    Upper,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Lower => "lower",
            Region::Mid => "mid",
            Region::Upper => "upper",
        }
    }
}

/// The split of `0..=N` into lower tail, middle window and upper tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionBounds {
    pub n: u64,
    pub m1: u64,
    pub m2: u64,
}

/// Largest `m` with `m^3 <= n`.
pub fn integer_cbrt(n: u64) -> u64 {
    let mut m = (n as f64).cbrt() as u64;
    while m > 0 && m.checked_pow(3).is_none_or(|c| c > n) {
        m -= 1;
    }
    while (m + 1).checked_pow(3).is_some_and(|c| c <= n) {
        m += 1;
    }
    m
}

/// Smallest `s` with `s^2 >= n`.
pub fn ceil_sqrt(n: u64) -> u64 {
    let s = n.isqrt();
    if s * s == n {
        s
    } else {
        s + 1
    }
}

impl RegionBounds {
    /// `M1 = floor(N^(1/3))`, `M2 = floor(N - sqrt N) + 1`.
    pub fn new(n: u64) -> Result<Self> {
        Self::check_n(n)?;
        Ok(RegionBounds {
            n,
            m1: integer_cbrt(n),
            m2: Self::m2_for(n),
        })
    }

    /// Same `M2`, caller-chosen lower edge `M1`.
    pub fn with_m1(n: u64, m1: u64) -> Result<Self> {
        Self::check_n(n)?;
        let m2 = Self::m2_for(n);
        if m1 == 0 || m1 >= m2 {
            return Err(Error::domain(format!("M1={m1} must satisfy 0 < M1 < M2={m2}")));
        }
        Ok(RegionBounds { n, m1, m2 })
    }

    fn check_n(n: u64) -> Result<()> {
        if n < MIN_REGION_N {
            return Err(Error::domain(format!(
                "N={n} is below {MIN_REGION_N}; the lower and upper regions would collide"
            )));
        }
        Ok(())
    }

    // floor(N - sqrt N) = N - ceil(sqrt N)
    fn m2_for(n: u64) -> u64 {
        n - ceil_sqrt(n) + 1
    }

    pub fn region(&self, i: u64) -> Region {
        if i <= self.m1 {
            Region::Lower
        } else if i <= self.m2 {
            Region::Mid
        } else {
            Region::Upper
        }
    }

    /// Indices of the middle window, `M1+1 ..= M2`.
    pub fn mid(&self) -> std::ops::RangeInclusive<u64> {
        self.m1 + 1..=self.m2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_examples() {
        assert_eq!(
            RegionBounds::new(1000).unwrap(),
            RegionBounds {
                n: 1000,
                m1: 10,
                m2: 969
            }
        );
        assert_eq!(RegionBounds::new(8).unwrap(), RegionBounds { n: 8, m1: 2, m2: 6 });
        assert_eq!(
            RegionBounds::new(1_000_000).unwrap(),
            RegionBounds {
                n: 1_000_000,
                m1: 100,
                m2: 999_001
            }
        );
        assert!(RegionBounds::new(7).is_err());
    }

    #[test]
    fn matches_float_definition_and_orders() {
        for n in 8..20_000u64 {
            let b = RegionBounds::new(n).unwrap();
            let x = n as f64;
            assert_eq!(b.m2, (x - x.sqrt()).floor() as u64 + 1, "N={n}");
            assert!(b.m1.pow(3) <= n && (b.m1 + 1).pow(3) > n);
            assert!(b.m1 < b.m2 && b.m2 <= n);
        }
    }

    #[test]
    fn cube_root_at_perfect_cubes() {
        for m in 1..3000u64 {
            assert_eq!(integer_cbrt(m * m * m), m);
            assert_eq!(integer_cbrt(m * m * m - 1), m - 1);
        }
        assert_eq!(ceil_sqrt(1_000_000), 1000);
        assert_eq!(ceil_sqrt(1_000_001), 1001);
    }

    #[test]
    fn m1_override() {
        let b = RegionBounds::with_m1(1000, 50).unwrap();
        assert_eq!((b.m1, b.m2), (50, 969));
        assert_eq!(b.region(50), Region::Lower);
        assert_eq!(b.region(51), Region::Mid);
        assert_eq!(b.region(969), Region::Mid);
        assert_eq!(b.region(970), Region::Upper);
        assert!(RegionBounds::with_m1(1000, 969).is_err());
        assert!(RegionBounds::with_m1(1000, 0).is_err());
    }
}
