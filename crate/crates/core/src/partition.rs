//! Integer partitions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-increasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("a partition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(Error::invalid("partition parts must be positive"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!(
                "partition parts must be non-increasing, got {}",
                join(&parts)
            )));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// The partitioned value.
    pub fn n(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn m(&self) -> usize {
        self.parts.len()
    }

    /// `mult(s)` = number of parts equal to `s`.
    pub fn multiplicity(&self, s: u64) -> usize {
        self.parts.iter().filter(|&&p| p == s).count()
    }

    /// Builds the partition with `counts[s-1]` parts equal to `s`.
    pub fn from_multiplicities(counts: &[u64]) -> Result<Self> {
        let mut parts = Vec::new();
        for (i, &c) in counts.iter().enumerate().rev() {
            parts.extend(std::iter::repeat_n(i as u64 + 1, c as usize));
        }
        Self::new(parts)
    }
}

fn join(parts: &[u64]) -> String {
    parts.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.parts))
    }
}

/// Parses `"2"` or `"1,1"`. Unsorted input is rejected, not sorted.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::invalid(format!("bad partition part {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl TryFrom<Vec<u64>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<u64>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u64> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// All partitions of `n` in reverse-lexicographic order: `(n)` first,
/// `(1,...,1)` last.
pub fn partitions(n: u64) -> Result<Vec<Partition>> {
    if n < 1 {
        return Err(Error::invalid("can only partition positive integers"));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(n, n, &mut current, &mut out);
    Ok(out)
}

fn fill(remaining: u64, max_part: u64, current: &mut Vec<u64>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    for p in (1..=max_part.min(remaining)).rev() {
        current.push(p);
        fill(remaining - p, p, current, out);
        current.pop();
    }
}
