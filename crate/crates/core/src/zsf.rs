//! Zonal spherical functions `φ_ρ(μ)` of the Gelfand pair `(S_2n, H_n)`.
//!
//! `φ_ρ` is constant on each generalized sphere `A_μ`, so it is a function of
//! the generalized distance `μ ⊢ n`. Three backends compute it exactly:
//!
//! - [`ZonalPolynomialBackend`] reads it off the power-sum expansion of the
//!   zonal polynomial `C_ρ`: `φ_ρ(μ) = b_{ρ,μ} / (b_{ρ,(1ⁿ)} |A_μ|)`.
//! - [`ExplicitBackend`] counts signed coverings of matchings by tabloids
//!   obtained from a column-permuted tableau of shape `2ρ`.
//! - [`AveragingBackend`] averages the character `χ^{2ρ}` over a coset `H_n σ`.
//!
//! Every backend memoizes its own values; tables computed by one backend are
//! never served by another.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::{BigInt, BigUint, One, Signed, Zero};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{
    all_matchings, cycle_type_of, distance_from_partners, distance_representative, sphere_size,
    Matching,
};
use crate::partition::{enumerate_partitions, Partition};
use crate::sym_group::{factorial, CharacterTable};
use crate::symfunc::{zonal_monomial_coeffs, TransitionCache};
use crate::Rational;

/// Largest `n` accepted by the explicit backend unless overridden.
pub const EXPLICIT_DEFAULT_LIMIT: usize = 7;
/// Largest `n` accepted by the averaging backend unless overridden.
pub const AVERAGING_DEFAULT_LIMIT: usize = 6;

/// Table of `φ_ρ(μ)` over all `μ ⊢ n`, in lexicographic order of `μ`.
pub type ZsfTable = BTreeMap<Partition, Rational>;

/// Backend selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    /// Zonal polynomials (the fast path).
    Zp,
    /// Signed tabloid coverings.
    Explicit,
    /// Character averaging over the isotropy group.
    Avg,
}

impl BackendKind {
    pub const ALL: [BackendKind; 3] = [BackendKind::Zp, BackendKind::Explicit, BackendKind::Avg];

    /// A fresh backend of this kind with default guards.
    pub fn build(self) -> Arc<dyn ZsfBackend> {
        match self {
            BackendKind::Zp => Arc::new(ZonalPolynomialBackend::new()),
            BackendKind::Explicit => Arc::new(ExplicitBackend::new()),
            BackendKind::Avg => Arc::new(AveragingBackend::new()),
        }
    }

    /// Size guard of a default-constructed backend, if any.
    pub fn default_limit(self) -> Option<usize> {
        match self {
            BackendKind::Zp => None,
            BackendKind::Explicit => Some(EXPLICIT_DEFAULT_LIMIT),
            BackendKind::Avg => Some(AVERAGING_DEFAULT_LIMIT),
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            BackendKind::Zp => "zp",
            BackendKind::Explicit => "explicit",
            BackendKind::Avg => "avg",
        })
    }
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zp" | "zonal" | "zonal-polynomial" => Ok(BackendKind::Zp),
            "explicit" => Ok(BackendKind::Explicit),
            "avg" | "averaging" => Ok(BackendKind::Avg),
            other => Err(Error::InvalidArgument(format!(
                "unknown backend {other:?} (expected zp, explicit or avg)"
            ))),
        }
    }
}

/// A provider of exact zonal spherical function values.
pub trait ZsfBackend: Send + Sync + fmt::Debug {
    fn kind(&self) -> BackendKind;

    /// All values `φ_ρ(·)` for one `ρ ⊢ n`.
    fn table(&self, rho: &Partition) -> Result<Arc<ZsfTable>>;

    /// `φ_ρ(μ)`; `ρ` and `μ` must be partitions of the same `n`.
    fn value(&self, rho: &Partition, mu: &Partition) -> Result<Rational> {
        if rho.size() != mu.size() {
            return Err(Error::PartitionSizeMismatch {
                left: rho.size(),
                right: mu.size(),
            });
        }
        Ok(self.table(rho)?[mu].clone())
    }

    /// `φ_ρ(d(x, y))`.
    fn value_at(&self, rho: &Partition, x: &Matching, y: &Matching) -> Result<Rational> {
        let mu = crate::matching::generalized_distance(x, y)?;
        self.value(rho, &mu)
    }
}

/// `φ_ρ` for every `μ ⊢ n` from the given backend.
pub fn zsf_table(rho: &Partition, backend: &dyn ZsfBackend) -> Result<Arc<ZsfTable>> {
    backend.table(rho)
}

#[derive(Debug, Default)]
struct TableCache {
    tables: RwLock<HashMap<Partition, Arc<ZsfTable>>>,
}

impl TableCache {
    fn get_or_try(
        &self,
        rho: &Partition,
        compute: impl FnOnce() -> Result<ZsfTable>,
    ) -> Result<Arc<ZsfTable>> {
        if let Some(hit) = self.tables.read().get(rho) {
            return Ok(Arc::clone(hit));
        }
        let table = Arc::new(compute()?);
        Ok(Arc::clone(
            self.tables.write().entry(rho.clone()).or_insert(table),
        ))
    }

    fn len(&self) -> usize {
        self.tables.read().len()
    }
}

fn check_guard(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::Capability { what, n, limit });
    }
    Ok(())
}

/// Zonal spherical functions through zonal polynomials.
#[derive(Debug, Default)]
pub struct ZonalPolynomialBackend {
    transitions: TransitionCache,
    tables: TableCache,
}

impl ZonalPolynomialBackend {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fills the monomial to power-sum transition cache for all `κ ⊢ n`.
    pub fn precompute(&self, n: u32) {
        self.transitions.precompute(n);
    }

    pub fn cached_tables(&self) -> usize {
        self.tables.len()
    }

    fn compute(&self, rho: &Partition) -> ZsfTable {
        let n = rho.size();
        let c = zonal_monomial_coeffs(rho);
        let b = self.transitions.to_power_sum_scaled(&c);
        let ones = Partition::column(n);
        let b_ones = b.get(&ones).cloned().unwrap_or_else(BigInt::zero);
        assert!(!b_ones.is_zero(), "b_(1^n) vanished for rho = {rho}");
        enumerate_partitions(n)
            .into_iter()
            .map(|mu| {
                let b_mu = b.get(&mu).cloned().unwrap_or_else(BigInt::zero);
                let den = &b_ones * BigInt::from(sphere_size(&mu));
                (mu, Rational::new(b_mu, den))
            })
            .collect()
    }
}

impl ZsfBackend for ZonalPolynomialBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::Zp
    }

    fn table(&self, rho: &Partition) -> Result<Arc<ZsfTable>> {
        self.tables.get_or_try(rho, || Ok(self.compute(rho)))
    }
}

/// `X_n` bucketed by generalized distance from the base point.
type Spheres = Vec<(Partition, Vec<Matching>)>;

/// Zonal spherical functions by signed tabloid coverings.
///
/// The tableau of shape `2ρ` holds the base pairs `{2h−1, 2h}` left to right
/// in consecutive cells of each row. Permutations of the entries inside each
/// odd column (first, third, …) move elements between rows; a matching is
/// covered when both ends of each of its pairs land in the same row.
#[derive(Debug)]
pub struct ExplicitBackend {
    limit: usize,
    spheres: RwLock<HashMap<usize, Arc<Spheres>>>,
    tables: TableCache,
}

impl Default for ExplicitBackend {
    fn default() -> Self {
        Self::with_limit(EXPLICIT_DEFAULT_LIMIT)
    }
}

impl ExplicitBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_limit(limit: usize) -> Self {
        Self {
            limit,
            spheres: RwLock::new(HashMap::new()),
            tables: TableCache::default(),
        }
    }

    /// All of `X_n`, bucketed by generalized distance to the base point.
    fn spheres(&self, n: usize) -> Arc<Spheres> {
        if let Some(hit) = self.spheres.read().get(&n) {
            return Arc::clone(hit);
        }
        let x0 = Matching::base_point(n).partners();
        let mut buckets: BTreeMap<Partition, Vec<Matching>> = BTreeMap::new();
        for x in all_matchings(n) {
            let mu = distance_from_partners(&x.partners(), &x0);
            buckets.entry(mu).or_default().push(x);
        }
        let value = Arc::new(buckets.into_iter().collect());
        Arc::clone(self.spheres.write().entry(n).or_insert(value))
    }

    fn compute(&self, rho: &Partition) -> ZsfTable {
        let n = rho.size() as usize;
        let assignments = column_assignments(rho);
        let mut table = ZsfTable::new();
        for (mu, sphere) in self.spheres(n).iter() {
            let mut a = 0i64;
            for x in sphere {
                for (rows, sign) in &assignments {
                    let covered = x
                        .pairs()
                        .iter()
                        .all(|&[p, q]| rows[p as usize - 1] == rows[q as usize - 1]);
                    if covered {
                        a += sign;
                    }
                }
            }
            table.insert(
                mu.clone(),
                Rational::new(a.into(), BigInt::from(sphere.len())),
            );
        }
        table
    }
}

/// Row of every element `1..=2n` (0-indexed) in each tabloid `{σ t}`,
/// `σ ∈ C'_t`, with `sgn σ`.
fn column_assignments(rho: &Partition) -> Vec<(Vec<u8>, i64)> {
    let n = rho.size() as usize;
    let mut base_rows = vec![0u8; 2 * n];
    // Entries of each odd column, listed top to bottom.
    let mut odd_columns: Vec<Vec<usize>> = vec![Vec::new(); rho.first() as usize];
    let mut next = 0usize;
    for (row, &len) in rho.parts().iter().enumerate() {
        for col in 0..2 * len as usize {
            base_rows[next] = row as u8;
            if col % 2 == 0 {
                odd_columns[col / 2].push(next);
            }
            next += 1;
        }
    }
    let mut out = vec![(base_rows, 1i64)];
    for column in &odd_columns {
        let perms = permutations_with_sign(column.len());
        let mut grown = Vec::with_capacity(out.len() * perms.len());
        for (rows, sign) in &out {
            for (perm, psign) in &perms {
                let mut rows = rows.clone();
                // Entry in cell i moves to the row of cell perm[i].
                for (i, &target) in perm.iter().enumerate() {
                    rows[column[i]] = target as u8;
                }
                grown.push((rows, sign * psign));
            }
        }
        out = grown;
    }
    out
}

/// All permutations of `0..k` with their signs.
fn permutations_with_sign(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(
        prefix: &mut Vec<usize>,
        used: &mut [bool],
        inversions: usize,
        out: &mut Vec<(Vec<usize>, i64)>,
    ) {
        let k = used.len();
        if prefix.len() == k {
            out.push((
                prefix.clone(),
                if inversions.is_multiple_of(2) { 1 } else { -1 },
            ));
            return;
        }
        for v in 0..k {
            if used[v] {
                continue;
            }
            // New inversions: earlier entries larger than v.
            let added = prefix.iter().filter(|&&p| p > v).count();
            used[v] = true;
            prefix.push(v);
            rec(prefix, used, inversions + added, out);
            prefix.pop();
            used[v] = false;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], 0, &mut out);
    out
}

impl ZsfBackend for ExplicitBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::Explicit
    }

    fn table(&self, rho: &Partition) -> Result<Arc<ZsfTable>> {
        check_guard("explicit backend", rho.size() as usize, self.limit)?;
        self.tables.get_or_try(rho, || Ok(self.compute(rho)))
    }
}

/// Zonal spherical functions as `|H_n|⁻¹ Σ_{π ∈ H_n} χ^{2ρ}(π σ_μ)`.
#[derive(Debug)]
pub struct AveragingBackend {
    limit: usize,
    characters: CharacterTable,
    tables: TableCache,
}

impl Default for AveragingBackend {
    fn default() -> Self {
        Self::with_limit(AVERAGING_DEFAULT_LIMIT)
    }
}

impl AveragingBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_limit(limit: usize) -> Self {
        Self {
            limit,
            characters: CharacterTable::new(),
            tables: TableCache::default(),
        }
    }

    fn average(&self, rho: &Partition, mu: &Partition, group: &[Vec<u32>]) -> Rational {
        let shape = rho.double();
        let sigma = distance_representative(mu);
        let mut total = BigInt::zero();
        let mut product = vec![0u32; sigma.degree()];
        for h in group {
            // (h ∘ σ)(i) = h(σ(i)), 0-indexed images.
            for (i, slot) in product.iter_mut().enumerate() {
                *slot = h[sigma.images()[i] as usize - 1];
            }
            let class = cycle_type_of(&product, 0);
            total += self.characters.value(&shape, &class);
        }
        Rational::new(total, BigInt::from(group.len()))
    }
}

/// Elements of the isotropy group `H_n` of the base point, as 0-indexed
/// image vectors: a permutation of the base pairs combined with a flip
/// inside each pair.
pub(crate) fn isotropy_group(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for perm in permutations_with_sign(n) {
        for flips in 0u32..(1 << n) {
            let mut images = vec![0u32; 2 * n];
            for (i, &j) in perm.0.iter().enumerate() {
                let flip = (flips >> i) & 1;
                images[2 * i] = 2 * j as u32 + flip;
                images[2 * i + 1] = 2 * j as u32 + 1 - flip;
            }
            out.push(images);
        }
    }
    out
}

impl ZsfBackend for AveragingBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::Avg
    }

    fn table(&self, rho: &Partition) -> Result<Arc<ZsfTable>> {
        let n = rho.size() as usize;
        check_guard("averaging backend", n, self.limit)?;
        self.tables.get_or_try(rho, || {
            let group = isotropy_group(n);
            Ok(enumerate_partitions(rho.size())
                .into_iter()
                .map(|mu| {
                    let v = self.average(rho, &mu, &group);
                    (mu, v)
                })
                .collect())
        })
    }
}

/// `|H_n| = 2ⁿ n!`.
pub fn isotropy_order(n: u32) -> BigUint {
    factorial(n) << n as usize
}

/// `Σ_μ |A_μ| φ_ρ(μ) φ_σ(μ)`, the `L²(X_n)` inner product of two zonal
/// spherical functions.
pub fn weighted_inner_product(a: &ZsfTable, b: &ZsfTable) -> Rational {
    a.iter()
        .map(|(mu, va)| {
            let size = Rational::from_integer(BigInt::from(sphere_size(mu)));
            size * va * &b[mu]
        })
        .sum()
}

/// Whether every value in the table has absolute value at most one.
pub fn is_bounded(table: &ZsfTable) -> bool {
    table.values().all(|v| v.abs() <= Rational::one())
}
