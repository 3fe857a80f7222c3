//! Perfect matchings of `{1, …, 2n}` and the `S_2n` action on them.
//!
//! Elements are 1-indexed in the public API and in all I/O. A [`Matching`]
//! is kept canonical (each pair ascending, pairs sorted by first element),
//! so structural equality and hashing coincide with set equality.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num::{BigUint, One};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::sym_group::factorial;

/// A perfect matching of `{1, …, 2n}` into `n` unordered pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<[u32; 2]>", into = "Vec<[u32; 2]>")]
pub struct Matching {
    pairs: Vec<[u32; 2]>,
}

impl Matching {
    /// Validates and canonicalizes a list of pairs.
    pub fn new(pairs: Vec<[u32; 2]>) -> Result<Self> {
        let two_n = 2 * pairs.len();
        let mut seen = vec![false; two_n + 1];
        for &[a, b] in &pairs {
            for e in [a, b] {
                if e == 0 || e as usize > two_n {
                    return Err(Error::InvalidMatching(format!(
                        "element {e} outside 1..={two_n}"
                    )));
                }
                if std::mem::replace(&mut seen[e as usize], true) {
                    return Err(Error::InvalidMatching(format!("element {e} appears twice")));
                }
            }
        }
        Ok(Self::canonical(pairs))
    }

    fn canonical(mut pairs: Vec<[u32; 2]>) -> Self {
        for p in &mut pairs {
            if p[0] > p[1] {
                p.swap(0, 1);
            }
        }
        pairs.sort_unstable();
        Self { pairs }
    }

    /// `x₀ = {{1,2}, {3,4}, …, {2n−1, 2n}}`.
    pub fn base_point(n: usize) -> Self {
        let pairs = (0..n as u32).map(|i| [2 * i + 1, 2 * i + 2]).collect();
        Self { pairs }
    }

    /// Number of pairs.
    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[[u32; 2]] {
        &self.pairs
    }

    /// 0-indexed partner table.
    pub fn partners(&self) -> Vec<usize> {
        let mut partner = vec![0; 2 * self.n()];
        for &[a, b] in &self.pairs {
            partner[a as usize - 1] = b as usize - 1;
            partner[b as usize - 1] = a as usize - 1;
        }
        partner
    }

    pub fn contains_pair(&self, a: u32, b: u32) -> bool {
        let key = if a < b { [a, b] } else { [b, a] };
        self.pairs.binary_search(&key).is_ok()
    }

    /// Number of pairs of `self` that are not pairs of `other`.
    pub fn differing_pairs(&self, other: &Matching) -> usize {
        self.pairs
            .iter()
            .filter(|p| other.pairs.binary_search(p).is_err())
            .count()
    }
}

impl TryFrom<Vec<[u32; 2]>> for Matching {
    type Error = Error;

    fn try_from(pairs: Vec<[u32; 2]>) -> Result<Self> {
        Matching::new(pairs)
    }
}

impl From<Matching> for Vec<[u32; 2]> {
    fn from(m: Matching) -> Self {
        m.pairs
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, [a, b]) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{{a},{b}}}")?;
        }
        write!(f, "}}")
    }
}

/// A permutation of `{1, …, m}` given by its images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    /// `images[i − 1] = σ(i)`.
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m + 1];
        for &v in &images {
            if v == 0 || v as usize > m || std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection of 1..={m}"
                )));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            images: (1..=m as u32).collect(),
        }
    }

    /// The transposition `(a b)` in `S_m`.
    pub fn transposition(m: usize, a: u32, b: u32) -> Result<Self> {
        if a == b || a == 0 || b == 0 || a as usize > m || b as usize > m {
            return Err(Error::InvalidPermutation(format!(
                "({a} {b}) is not a transposition of 1..={m}"
            )));
        }
        let mut images: Vec<u32> = (1..=m as u32).collect();
        images.swap(a as usize - 1, b as usize - 1);
        Ok(Self { images })
    }

    /// Uniform random permutation of `{1, …, m}`.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut images: Vec<u32> = (1..=m as u32).collect();
        images.shuffle(rng);
        Self { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `σ(i)`, 1-indexed.
    pub fn apply(&self, i: u32) -> u32 {
        self.images[i as usize - 1]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&i| self.apply(i)).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v as usize - 1] = i as u32 + 1;
        }
        Permutation { images }
    }

    /// Cycle type as a partition of the degree.
    pub fn cycle_type(&self) -> Partition {
        cycle_type_of(&self.images, 1)
    }
}

/// Cycle type of a permutation given as images with the given index base.
pub(crate) fn cycle_type_of(images: &[u32], base: u32) -> Partition {
    let m = images.len();
    let mut seen = vec![false; m];
    let mut lengths = Vec::new();
    for start in 0..m {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            len += 1;
            i = (images[i] - base) as usize;
        }
        lengths.push(len);
    }
    Partition::from_unsorted(lengths)
}

/// `σ ⊳ x`: relabel every element of `x` through `σ`.
pub fn act(sigma: &Permutation, x: &Matching) -> Result<Matching> {
    if sigma.degree() != 2 * x.n() {
        return Err(Error::SizeMismatch {
            expected: 2 * x.n(),
            found: sigma.degree(),
        });
    }
    let pairs = x
        .pairs
        .iter()
        .map(|&[a, b]| [sigma.apply(a), sigma.apply(b)])
        .collect();
    Ok(Matching::canonical(pairs))
}

fn check_same_size(x: &Matching, y: &Matching) -> Result<()> {
    if x.n() != y.n() {
        return Err(Error::SizeMismatch {
            expected: x.n(),
            found: y.n(),
        });
    }
    Ok(())
}

/// Generalized distance: half-lengths of the alternating cycles of `x ∪ y`,
/// as a partition of `n`.
pub fn generalized_distance(x: &Matching, y: &Matching) -> Result<Partition> {
    check_same_size(x, y)?;
    Ok(distance_from_partners(&x.partners(), &y.partners()))
}

pub(crate) fn distance_from_partners(px: &[usize], py: &[usize]) -> Partition {
    let mut seen = vec![false; px.len()];
    let mut halves = Vec::new();
    for start in 0..px.len() {
        if seen[start] {
            continue;
        }
        // Walk x-edge then y-edge until the cycle closes.
        let mut pairs = 0;
        let mut v = start;
        loop {
            let a = px[v];
            seen[v] = true;
            seen[a] = true;
            pairs += 1;
            v = py[a];
            if v == start {
                break;
            }
        }
        halves.push(pairs);
    }
    Partition::from_unsorted(halves)
}

/// `|A_μ| = n! ∏_k 2^{t_k (k−1)} / (t_k! k^{t_k})`: number of matchings at
/// generalized distance `μ` from any fixed matching.
pub fn sphere_size(mu: &Partition) -> BigUint {
    let mut num = factorial(mu.size());
    let mut den = BigUint::one();
    for (k, t) in mu.multiplicities() {
        num <<= (t * (k - 1)) as usize;
        den *= factorial(t) * BigUint::from(k).pow(t);
    }
    num / den
}

/// `|X_n| = (2n)! / (2ⁿ n!) = (2n − 1)!!`.
pub fn matching_count(n: usize) -> BigUint {
    (1..n as u64).fold(BigUint::one(), |acc, k| acc * (2 * k + 1))
}

/// Matchings reachable from `x` by one transposition, `n(n−1)` of them.
pub fn neighbors(x: &Matching) -> Vec<Matching> {
    let n = x.n();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1));
    for i in 0..n {
        for j in i + 1..n {
            let [a, b] = x.pairs[i];
            let [c, d] = x.pairs[j];
            for (p, q) in [([a, c], [b, d]), ([a, d], [b, c])] {
                let mut pairs = x.pairs.clone();
                pairs[i] = p;
                pairs[j] = q;
                out.push(Matching::canonical(pairs));
            }
        }
    }
    out
}

/// All matchings of `{1, …, 2n}` in lexicographic order of canonical form.
pub fn all_matchings(n: usize) -> Vec<Matching> {
    fn rec(free: &mut Vec<u32>, acc: &mut Vec<[u32; 2]>, out: &mut Vec<Matching>) {
        if free.is_empty() {
            out.push(Matching { pairs: acc.clone() });
            return;
        }
        let first = free.remove(0);
        for k in 0..free.len() {
            let partner = free.remove(k);
            acc.push([first, partner]);
            rec(free, acc, out);
            acc.pop();
            free.insert(k, partner);
        }
        free.insert(0, first);
    }
    let mut out = Vec::new();
    let mut free: Vec<u32> = (1..=2 * n as u32).collect();
    rec(&mut free, &mut Vec::with_capacity(n), &mut out);
    out
}

/// A shortest-path distance, exact or a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum GraphDistance {
    Exact(u32),
    /// A certified lower bound when exact search is too large.
    LowerBound(u32),
}

impl GraphDistance {
    pub fn value(self) -> u32 {
        match self {
            Self::Exact(v) | Self::LowerBound(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Self::Exact(_))
    }
}

/// Default size limit for exact breadth-first distances (`|X_6| = 10395`).
pub const DEFAULT_EXACT_LIMIT: usize = 6;

/// Shortest-path distance between `x` and `y` in the quotient Cayley graph.
///
/// Exact by breadth-first search when `n ≤ exact_limit`. Otherwise
/// `⌈(pairs of x not in y) / 2⌉`, a lower bound because one transposition
/// replaces at most two pairs.
pub fn quotient_distance(x: &Matching, y: &Matching, exact_limit: usize) -> Result<GraphDistance> {
    check_same_size(x, y)?;
    if x == y {
        return Ok(GraphDistance::Exact(0));
    }
    if x.n() > exact_limit {
        let diff = x.differing_pairs(y) as u32;
        return Ok(GraphDistance::LowerBound(diff.div_ceil(2)));
    }
    let mut dist: HashMap<Matching, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(x.clone(), 0);
    queue.push_back(x.clone());
    while let Some(cur) = queue.pop_front() {
        let d = dist[&cur];
        for nb in neighbors(&cur) {
            if nb == *y {
                return Ok(GraphDistance::Exact(d + 1));
            }
            if !dist.contains_key(&nb) {
                dist.insert(nb.clone(), d + 1);
                queue.push_back(nb);
            }
        }
    }
    unreachable!("quotient Cayley graph is connected")
}

/// Whether `y` is within two transpositions of `x`.
pub fn within_two_transpositions(x: &Matching, y: &Matching) -> Result<bool> {
    check_same_size(x, y)?;
    if x == y {
        return Ok(true);
    }
    let around_x: HashSet<Matching> = neighbors(x).into_iter().collect();
    if around_x.contains(y) {
        return Ok(true);
    }
    Ok(neighbors(y).iter().any(|m| around_x.contains(m)))
}

/// Uniform random matching: shuffle `1..=2n` and pair consecutive entries.
pub fn random_matching<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matching {
    let mut elems: Vec<u32> = (1..=2 * n as u32).collect();
    elems.shuffle(rng);
    let pairs = elems.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    Matching::canonical(pairs)
}

/// Deterministic random matching for a given seed.
pub fn random_matching_seeded(n: usize, seed: u64) -> Matching {
    random_matching(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `count` random matchings from one seeded stream.
pub fn random_matchings(n: usize, count: usize, seed: u64) -> Vec<Matching> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_matching(n, &mut rng)).collect()
}

/// A permutation `σ` with `d(σ ⊳ x₀, x₀) = μ`: consecutive blocks of `μ_i`
/// base pairs are closed into single alternating cycles.
pub fn distance_representative(mu: &Partition) -> Permutation {
    let n = mu.size() as usize;
    let mut images = vec![0u32; 2 * n];
    let mut start = 0usize; // first base pair of the block, 0-indexed
    for &k in mu.parts() {
        let k = k as usize;
        // Target pairs {2s+2, 2s+3}, …, {2s+2k, 2s+1} (1-indexed elements).
        for j in 0..k {
            let pair = start + j;
            let a = 2 * (start + j) as u32 + 2;
            let b = if j + 1 < k {
                a + 1
            } else {
                2 * start as u32 + 1
            };
            images[2 * pair] = a;
            images[2 * pair + 1] = b;
        }
        start += k;
    }
    Permutation { images }
}
