use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A fixed 0/1 pattern for the first `k` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrefixEvent {
    pattern: Vec<u8>,
    alpha: u64,
}

impl PrefixEvent {
    pub fn new(pattern: Vec<u8>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::Domain("prefix pattern must be nonempty".into()));
        }
        if let Some(bad) = pattern.iter().find(|&&x| x > 1) {
            return Err(Error::Parse(format!("pattern entries must be 0 or 1, got {bad}")));
        }
        let alpha = pattern.iter().map(|&x| x as u64).sum();
        Ok(PrefixEvent { pattern, alpha })
    }

    /// `alpha` ones followed by `k - alpha` zeros.
    pub fn canonical(k: u64, alpha: u64) -> Result<Self> {
        if alpha > k {
            return Err(Error::Domain(format!("alpha={alpha} exceeds k={k}")));
        }
        let mut pattern = vec![1u8; alpha as usize];
        pattern.resize(k as usize, 0);
        Self::new(pattern)
    }

    /// Every pattern of length `k`, in lexicographic order.
    pub fn all_of_length(k: u32) -> impl Iterator<Item = PrefixEvent> {
        (0u64..(1u64 << k)).map(move |bits| {
            let pattern = (0..k).map(|j| ((bits >> (k - 1 - j)) & 1) as u8).collect();
            PrefixEvent::new(pattern).expect("valid bits")
        })
    }

    pub fn pattern(&self) -> &[u8] {
        &self.pattern
    }

    pub fn k(&self) -> u64 {
        self.pattern.len() as u64
    }

    /// Number of ones.
    pub fn alpha(&self) -> u64 {
        self.alpha
    }
}

impl FromStr for PrefixEvent {
    type Err = Error;

    /// Accepts `"1,1,0"` or `"110"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let pattern: Result<Vec<u8>> = if s.contains(',') {
            s.split(',')
                .map(|t| match t.trim() {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    other => Err(Error::Parse(format!("bad pattern entry {other:?}"))),
                })
                .collect()
        } else {
            s.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    other => Err(Error::Parse(format!("bad pattern entry {other:?}"))),
                })
                .collect()
        };
        PrefixEvent::new(pattern?)
    }
}

impl fmt::Display for PrefixEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pattern.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_spellings() {
        let e: PrefixEvent = "1,1,0".parse().unwrap();
        assert_eq!((e.k(), e.alpha()), (3, 2));
        assert_eq!("1101".parse::<PrefixEvent>().unwrap().alpha(), 3);
        assert_eq!(e.to_string(), "1,1,0");
        assert!("1,2".parse::<PrefixEvent>().is_err());
        assert!("".parse::<PrefixEvent>().is_err());
    }

    #[test]
    fn enumerates_all_patterns() {
        let all: Vec<_> = PrefixEvent::all_of_length(3).collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[0].pattern(), &[0, 0, 0]);
        assert_eq!(all[6].pattern(), &[1, 1, 0]);
        assert_eq!(PrefixEvent::canonical(4, 1).unwrap().pattern(), &[1, 0, 0, 0]);
    }
}
