//! Integer partitions.
//!
//! A [`Partition`] is stored canonically as a non-increasing sequence of
//! positive parts. The derived ordering is lexicographic on the part
//! sequence, which for partitions of the same integer coincides with the
//! usual lexicographic order (missing trailing parts compare as zero).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition of a non-negative integer, parts sorted non-increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Validates a non-increasing sequence of positive parts.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition {
                parts,
                reason: "parts must be positive".into(),
            });
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition {
                parts,
                reason: "parts must be non-increasing".into(),
            });
        }
        Ok(Self(parts))
    }

    /// Builds a partition from parts in any order; zero parts are dropped.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub(crate) fn from_sorted_unchecked(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.iter().all(|&p| p > 0));
        Self(parts)
    }

    /// The empty partition of zero.
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// The one-row partition `(n)`.
    pub fn row(n: u32) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Self(vec![n])
        }
    }

    /// The one-column partition `(1, …, 1)`.
    pub fn column(n: u32) -> Self {
        Self(vec![1; n as usize])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<u32> {
        self.0
    }

    /// The integer being partitioned.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest part, zero for the empty partition.
    pub fn first(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }

    /// Smallest part, zero for the empty partition.
    pub fn last(&self) -> u32 {
        self.0.last().copied().unwrap_or(0)
    }

    /// `ρ′_j = |{ i : ρ_i ≥ j }|`.
    pub fn conjugate(&self) -> Partition {
        let first = self.first();
        let parts = (1..=first)
            .map(|j| self.0.iter().take_while(|&&p| p >= j).count() as u32)
            .collect();
        Partition(parts)
    }

    /// `2ρ = (2ρ_1, …, 2ρ_s)`.
    pub fn double(&self) -> Partition {
        Partition(self.0.iter().map(|&p| 2 * p).collect())
    }

    /// Multiplicities `t_k` of each part size `k`, as `(k, t_k)` in
    /// decreasing order of `k`.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.0 {
            match out.last_mut() {
                Some((k, t)) if *k == p => *t += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// `f_κ = Σ κ_i (κ_i − i)` with 1-based `i`.
    pub fn content_weight(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &k)| k as i64 * (k as i64 - (i as i64 + 1)))
            .sum()
    }

    /// Dot-separated form used in debug dumps, e.g. `3.1.1`.
    pub fn dotted(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        parts.join(".")
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `3,1,1`, `3.1.1`, `(3,1,1)` or `[3,1,1]`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s
            .trim()
            .trim_start_matches(['(', '['])
            .trim_end_matches([')', ']']);
        if trimmed.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let parts = trimmed
            .split([',', '.', ' '])
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::InvalidArgument(format!("bad partition {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// Lexicographic comparison of two partitions of the same integer.
pub fn lex_compare(a: &Partition, b: &Partition) -> Result<Ordering> {
    let (sa, sb) = (a.size(), b.size());
    if sa != sb {
        return Err(Error::PartitionSizeMismatch {
            left: sa,
            right: sb,
        });
    }
    Ok(a.cmp(b))
}

/// Lazy iterator over the partitions of `n` in strictly descending
/// lexicographic order, starting at `(n)`.
#[derive(Clone, Debug)]
pub struct PartitionsDesc {
    next: Option<Vec<u32>>,
}

impl PartitionsDesc {
    pub fn new(n: u32) -> Self {
        Self {
            next: Some(if n == 0 { Vec::new() } else { vec![n] }),
        }
    }
}

impl Iterator for PartitionsDesc {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let current = self.next.take()?;
        // Rightmost part larger than one gets decremented; the freed units
        // are refilled greedily with parts no larger than the new value.
        if let Some(k) = current.iter().rposition(|&p| p > 1) {
            let mut succ = current[..k].to_vec();
            let v = current[k] - 1;
            let mut rem = (current.len() - k - 1) as u32 + 1;
            succ.push(v);
            while rem > 0 {
                let part = rem.min(v);
                succ.push(part);
                rem -= part;
            }
            self.next = Some(succ);
        }
        Some(Partition(current))
    }
}

/// All partitions of `n` in strictly descending lexicographic order.
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    PartitionsDesc::new(n).collect()
}

/// Heuristic used to pick a truncation set of partitions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationHeuristic {
    /// Largest first part `ρ_1`, ties broken by descending lexicographic
    /// order. This is plain descending lexicographic order.
    #[default]
    MaxPart,
    /// Fewest parts first, ties broken by descending lexicographic order.
    Length,
    /// Largest smallest part first, ties broken by descending
    /// lexicographic order.
    MinPart,
}

impl FromStr for TruncationHeuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-part" => Ok(Self::MaxPart),
            "length" => Ok(Self::Length),
            "min-part" => Ok(Self::MinPart),
            other => Err(Error::InvalidArgument(format!(
                "unknown heuristic {other:?} (expected max-part, length or min-part)"
            ))),
        }
    }
}

impl fmt::Display for TruncationHeuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Self::MaxPart => "max-part",
            Self::Length => "length",
            Self::MinPart => "min-part",
        })
    }
}

/// Picks `size` partitions of `n` with the default `ρ_1` heuristic.
pub fn select_truncation(n: u32, size: usize) -> Result<Vec<Partition>> {
    select_truncation_with(n, size, TruncationHeuristic::MaxPart)
}

/// Picks `size` partitions of `n` ranked by `heuristic`.
///
/// For [`TruncationHeuristic::MaxPart`] the selection is generated lazily
/// and never enumerates all `p(n)` partitions.
pub fn select_truncation_with(
    n: u32,
    size: usize,
    heuristic: TruncationHeuristic,
) -> Result<Vec<Partition>> {
    if n == 0 || size == 0 {
        return Err(Error::InvalidArgument(format!(
            "truncation size {size} out of range for n = {n}"
        )));
    }
    let out: Vec<Partition> = match heuristic {
        TruncationHeuristic::MaxPart => PartitionsDesc::new(n).take(size).collect(),
        TruncationHeuristic::Length | TruncationHeuristic::MinPart => {
            // Stable sort keeps the descending lexicographic tie-break.
            let mut all = enumerate_partitions(n);
            match heuristic {
                TruncationHeuristic::Length => all.sort_by_key(|p| p.len()),
                _ => all.sort_by_key(|p| std::cmp::Reverse(p.last())),
            }
            all.truncate(size);
            all
        }
    };
    if out.len() < size {
        return Err(Error::InvalidArgument(format!(
            "truncation size {size} exceeds p({n}) = {}",
            out.len()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn enumerate_four() {
        let got = enumerate_partitions(4);
        let want = vec![
            p(&[4]),
            p(&[3, 1]),
            p(&[2, 2]),
            p(&[2, 1, 1]),
            p(&[1, 1, 1, 1]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn enumerate_zero_is_empty_partition() {
        assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
    }

    #[test]
    fn enumerate_ten_has_42() {
        assert_eq!(enumerate_partitions(10).len(), 42);
    }

    #[test]
    fn conjugates() {
        assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
        assert_eq!(p(&[5]).conjugate(), Partition::column(5));
        assert_eq!(p(&[2, 2]).conjugate(), p(&[2, 2]));
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
    }

    #[test]
    fn doubling() {
        assert_eq!(p(&[2, 1]).double(), p(&[4, 2]));
        assert_eq!(Partition::empty().double(), Partition::empty());
        assert_eq!(p(&[1, 1, 1]).double(), p(&[2, 2, 2]));
    }

    #[test]
    fn lex() {
        assert_eq!(
            lex_compare(&p(&[3, 1]), &p(&[2, 2])).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            lex_compare(&p(&[2, 1, 1]), &p(&[2, 2])).unwrap(),
            Ordering::Less
        );
        assert_eq!(lex_compare(&p(&[4]), &p(&[4])).unwrap(), Ordering::Equal);
        assert!(matches!(
            lex_compare(&p(&[4]), &p(&[3])),
            Err(Error::PartitionSizeMismatch { .. })
        ));
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(select_truncation(5, 2).unwrap(), vec![p(&[5]), p(&[4, 1])]);
        assert_eq!(
            select_truncation(5, 3).unwrap(),
            vec![p(&[5]), p(&[4, 1]), p(&[3, 2])]
        );
        assert_eq!(select_truncation(5, 7).unwrap(), enumerate_partitions(5));
        assert!(select_truncation(5, 8).is_err());
        assert!(select_truncation(5, 0).is_err());
    }

    #[test]
    fn alternative_heuristics() {
        let by_len = select_truncation_with(4, 3, TruncationHeuristic::Length).unwrap();
        assert_eq!(by_len, vec![p(&[4]), p(&[3, 1]), p(&[2, 2])]);
        let by_min = select_truncation_with(6, 3, TruncationHeuristic::MinPart).unwrap();
        assert_eq!(by_min, vec![p(&[6]), p(&[3, 3]), p(&[4, 2])]);
    }

    #[test]
    fn validation_and_parsing() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert_eq!("3.1.1".parse::<Partition>().unwrap(), p(&[3, 1, 1]));
        assert_eq!("(4,2)".parse::<Partition>().unwrap(), p(&[4, 2]));
        assert_eq!(Partition::from_unsorted(vec![1, 0, 3, 2]), p(&[3, 2, 1]));
        assert_eq!(p(&[3, 1, 1]).multiplicities(), vec![(3, 1), (1, 2)]);
        assert_eq!(p(&[2]).content_weight(), 2);
        assert_eq!(p(&[1, 1]).content_weight(), -1);
    }

    #[test]
    fn json_form() {
        let s = serde_json::to_string(&p(&[4, 2, 1])).unwrap();
        assert_eq!(s, "[4,2,1]");
        let back: Partition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p(&[4, 2, 1]));
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    }
}
