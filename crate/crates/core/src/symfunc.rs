//! Exact symmetric-function computations on partitions of `n`.
//!
//! Zonal polynomials are expanded in the monomial basis by a descending
//! lexicographic recurrence, and monomials are converted to power sums through
//! augmented monomials `m̃_κ = (∏_j t_j!) m_κ`, whose power-sum coefficients are
//! integers. Only coefficients indexed by partitions of `n` are tracked, so
//! everything holds for any number of variables `m ≥ n`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num::{BigInt, Integer, One, Signed, Zero};
use parking_lot::RwLock;
use serde_json::{Map, Value};

use crate::partition::{Partition, PartitionsDesc};
use crate::sym_group::factorial;
use crate::Rational;

/// Which basis a [`BasisExpansion`] is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Monomial,
    PowerSum,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Monomial => "monomial",
            Basis::PowerSum => "power_sum",
        })
    }
}

/// A homogeneous symmetric function as a sparse map from partitions to exact
/// rational coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisExpansion {
    basis: Basis,
    coeffs: BTreeMap<Partition, Rational>,
}

impl BasisExpansion {
    pub fn zero(basis: Basis) -> Self {
        Self {
            basis,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Coefficient of `key`, zero when absent.
    pub fn get(&self, key: &Partition) -> Rational {
        self.coeffs.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `value` to the coefficient of `key`, dropping it if it cancels.
    pub fn add(&mut self, key: Partition, value: Rational) {
        if value.is_zero() {
            return;
        }
        match self.coeffs.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(value);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += value;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &Rational)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// JSON object mapping `"a.b.c"` to `"num/den"`.
    pub fn to_debug_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("basis".into(), Value::String(self.basis.to_string()));
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| {
                (
                    k.dotted(),
                    Value::String(format!("{}/{}", v.numer(), v.denom())),
                )
            })
            .collect();
        map.insert("coeffs".into(), Value::Object(coeffs));
        Value::Object(map)
    }
}

/// `c_{ρ,κ}` for every `κ ≤_lex ρ`, normalized by `c_{ρ,ρ} = 1`.
///
/// Each `κ` collects `[(κ_r + t) − (κ_l − t)] · c_{ρ,μ}` over `r < l`,
/// `1 ≤ t ≤ κ_l`, where `μ` is `κ` with `t` moved from part `l` to part `r`
/// and re-sorted, keeping only `μ ≤_lex ρ`. The sum is divided by
/// `f_ρ − f_κ` with `f_κ = Σ κ_i (κ_i − i)`.
///
/// When the collected sum is zero the coefficient is zero, even if the
/// denominator also vanishes (this happens only for `κ` outside the dominance
/// order ideal of `ρ`, where `f` can collide).
pub fn zonal_monomial_coeffs(rho: &Partition) -> BasisExpansion {
    let f_rho = rho.content_weight();
    let mut coeffs: HashMap<Partition, Rational> = HashMap::new();
    coeffs.insert(rho.clone(), Rational::one());
    let mut out = BasisExpansion::zero(Basis::Monomial);
    out.coeffs.insert(rho.clone(), Rational::one());

    for kappa in PartitionsDesc::new(rho.size())
        .skip_while(|k| k != rho)
        .skip(1)
    {
        let parts = kappa.parts();
        let mut sum = Rational::zero();
        let mut scratch = Vec::with_capacity(parts.len());
        for l in 1..parts.len() {
            for r in 0..l {
                for t in 1..=parts[l] {
                    scratch.clear();
                    scratch.extend_from_slice(parts);
                    scratch[r] += t;
                    scratch[l] -= t;
                    let mu = Partition::from_unsorted(scratch.clone());
                    if mu > *rho {
                        continue;
                    }
                    if let Some(c) = coeffs.get(&mu) {
                        let weight = (parts[r] + t) as i64 - (parts[l] - t) as i64;
                        sum += c * Rational::from_integer(weight.into());
                    }
                }
            }
        }
        if sum.is_zero() {
            continue;
        }
        let denom = f_rho - kappa.content_weight();
        assert!(
            denom != 0,
            "zonal recurrence for {rho}: nonzero sum with vanishing denominator at {kappa}"
        );
        let c = sum / Rational::from_integer(denom.into());
        out.coeffs.insert(kappa.clone(), c.clone());
        coeffs.insert(kappa, c);
    }
    out
}

type IntExpansion = HashMap<Partition, BigInt>;

/// Memo table for augmented monomials `m̃_κ` in the power-sum basis.
///
/// Keys are canonical partitions of any size `≤ n`; values are integer
/// coefficient maps shared behind `Arc`. Readers proceed concurrently and
/// insertion is insert-if-absent, so racing computations are harmless.
#[derive(Debug, Default)]
pub struct TransitionCache {
    table: RwLock<HashMap<Partition, Arc<IntExpansion>>>,
}

impl TransitionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.table.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.read().is_empty()
    }

    /// Fills the cache for every partition of `n` (and hence of all smaller
    /// sizes reached by the recursion).
    pub fn precompute(&self, n: u32) {
        for kappa in PartitionsDesc::new(n) {
            self.augmented(&kappa);
        }
    }

    /// `m̃_κ` in the power-sum basis, integer coefficients.
    pub fn augmented(&self, kappa: &Partition) -> Arc<IntExpansion> {
        if let Some(hit) = self.table.read().get(kappa) {
            return Arc::clone(hit);
        }
        let value = Arc::new(self.compute(kappa));
        Arc::clone(self.table.write().entry(kappa.clone()).or_insert(value))
    }

    fn compute(&self, kappa: &Partition) -> IntExpansion {
        let parts = kappa.parts();
        let mut out = IntExpansion::new();
        match parts.len() {
            0 => {
                out.insert(Partition::empty(), BigInt::one());
            }
            1 => {
                out.insert(kappa.clone(), BigInt::one());
            }
            r => {
                let last = parts[r - 1];
                let prefix = Partition::from_sorted_unchecked(parts[..r - 1].to_vec());
                for (mu, c) in self.augmented(&prefix).iter() {
                    let mut grown = mu.parts().to_vec();
                    grown.push(last);
                    *out.entry(Partition::from_unsorted(grown)).or_default() += c;
                }
                for i in 0..r - 1 {
                    let mut merged = parts[..r - 1].to_vec();
                    merged[i] += last;
                    let merged = Partition::from_unsorted(merged);
                    for (mu, c) in self.augmented(&merged).iter() {
                        *out.entry(mu.clone()).or_default() -= c;
                    }
                }
                out.retain(|_, c| !c.is_zero());
            }
        }
        out
    }

    /// Row `T_κ` of the monomial to power-sum transition matrix:
    /// `m_κ = Σ_μ T_{κ,μ} p_μ`.
    pub fn transition_row(&self, kappa: &Partition) -> BasisExpansion {
        let aut = automorphisms(kappa);
        let mut out = BasisExpansion::zero(Basis::PowerSum);
        for (mu, c) in self.augmented(kappa).iter() {
            out.coeffs
                .insert(mu.clone(), Rational::new(c.clone(), aut.clone()));
        }
        out
    }

    /// Rewrites a monomial-basis expansion in the power-sum basis.
    pub fn to_power_sum(&self, c: &BasisExpansion) -> BasisExpansion {
        assert_eq!(
            c.basis,
            Basis::Monomial,
            "expected a monomial-basis expansion"
        );
        let mut acc: HashMap<Partition, Rational> = HashMap::new();
        for (kappa, ck) in c.iter() {
            for (mu, t) in self.transition_row(kappa).iter() {
                *acc.entry(mu.clone()).or_insert_with(Rational::zero) += ck * t;
            }
        }
        BasisExpansion {
            basis: Basis::PowerSum,
            coeffs: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    /// Power-sum coefficients of `Σ_κ c_κ m_κ` scaled by an unspecified
    /// positive integer, computed without rational arithmetic in the inner
    /// loop. Ratios between entries equal those of [`Self::to_power_sum`].
    pub fn to_power_sum_scaled(&self, c: &BasisExpansion) -> HashMap<Partition, BigInt> {
        assert_eq!(
            c.basis,
            Basis::Monomial,
            "expected a monomial-basis expansion"
        );
        // w_κ = c_κ / aut(κ), brought to a common denominator.
        let weights: Vec<(&Partition, Rational)> = c
            .iter()
            .map(|(k, v)| (k, v / Rational::from_integer(automorphisms(k))))
            .collect();
        let lcm = weights
            .iter()
            .fold(BigInt::one(), |acc, (_, w)| acc.lcm(w.denom()));
        let mut acc: HashMap<Partition, BigInt> = HashMap::new();
        for (kappa, w) in weights {
            let scale = w.numer() * (&lcm / w.denom());
            for (mu, t) in self.augmented(kappa).iter() {
                *acc.entry(mu.clone()).or_default() += &scale * t;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        debug_assert!(lcm.is_positive());
        acc
    }
}

/// `∏_j t_j!` where `t_j` is the multiplicity of `j` in `κ`.
pub fn automorphisms(kappa: &Partition) -> BigInt {
    kappa
        .multiplicities()
        .into_iter()
        .fold(BigInt::one(), |acc, (_, t)| {
            acc * BigInt::from(factorial(t))
        })
}

/// `T_κ` through a fresh cache.
pub fn transition_matrix_row(kappa: &Partition) -> BasisExpansion {
    TransitionCache::new().transition_row(kappa)
}

/// `Σ_κ c_κ T_κ` through a fresh cache.
pub fn to_power_sum(c: &BasisExpansion) -> BasisExpansion {
    TransitionCache::new().to_power_sum(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_partitions;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn q(num: i64, den: i64) -> Rational {
        Rational::new(num.into(), den.into())
    }

    fn expansion(basis: Basis, entries: &[(&[u32], Rational)]) -> BasisExpansion {
        let mut e = BasisExpansion::zero(basis);
        for (k, v) in entries {
            e.add(p(k), v.clone());
        }
        e
    }

    #[test]
    fn zonal_coefficients_small() {
        let two = zonal_monomial_coeffs(&p(&[2]));
        assert_eq!(
            two,
            expansion(Basis::Monomial, &[(&[2], q(1, 1)), (&[1, 1], q(2, 3))])
        );
        let one_one = zonal_monomial_coeffs(&p(&[1, 1]));
        assert_eq!(one_one, expansion(Basis::Monomial, &[(&[1, 1], q(1, 1))]));
    }

    #[test]
    fn zonal_coefficients_match_known_n3() {
        // Classical zonal polynomials, rescaled so that c_{ρ,ρ} = 1.
        let c3 = zonal_monomial_coeffs(&p(&[3]));
        assert_eq!(c3.get(&p(&[2, 1])), q(3, 5));
        assert_eq!(c3.get(&p(&[1, 1, 1])), q(2, 5));
        let c21 = zonal_monomial_coeffs(&p(&[2, 1]));
        assert_eq!(c21.get(&p(&[1, 1, 1])), q(3, 2));
    }

    #[test]
    fn full_column_coefficient_is_nonzero() {
        for n in 1..=20u32 {
            let c = zonal_monomial_coeffs(&Partition::row(n));
            assert!(!c.get(&Partition::column(n)).is_zero(), "n = {n}");
        }
    }

    #[test]
    fn transition_rows() {
        assert_eq!(
            transition_matrix_row(&p(&[2])),
            expansion(Basis::PowerSum, &[(&[2], q(1, 1))])
        );
        assert_eq!(
            transition_matrix_row(&p(&[1, 1])),
            expansion(Basis::PowerSum, &[(&[1, 1], q(1, 2)), (&[2], q(-1, 2))])
        );
        assert_eq!(
            transition_matrix_row(&p(&[1, 1, 1])),
            expansion(
                Basis::PowerSum,
                &[(&[1, 1, 1], q(1, 6)), (&[2, 1], q(-1, 2)), (&[3], q(1, 3))]
            )
        );
    }

    #[test]
    fn power_sum_examples() {
        let b = to_power_sum(&zonal_monomial_coeffs(&p(&[2])));
        assert_eq!(
            b,
            expansion(Basis::PowerSum, &[(&[1, 1], q(1, 3)), (&[2], q(2, 3))])
        );
        let b = to_power_sum(&zonal_monomial_coeffs(&p(&[1, 1])));
        assert_eq!(
            b,
            expansion(Basis::PowerSum, &[(&[1, 1], q(1, 2)), (&[2], q(-1, 2))])
        );
        assert!(to_power_sum(&BasisExpansion::zero(Basis::Monomial)).is_empty());
    }

    #[test]
    fn scaled_power_sum_is_proportional() {
        let cache = TransitionCache::new();
        for rho in enumerate_partitions(6) {
            let c = zonal_monomial_coeffs(&rho);
            let exact = cache.to_power_sum(&c);
            let scaled = cache.to_power_sum_scaled(&c);
            let ones = Partition::column(6);
            let ratio = Rational::from_integer(scaled[&ones].clone()) / exact.get(&ones);
            for (mu, v) in exact.iter() {
                assert_eq!(Rational::from_integer(scaled[mu].clone()), v * &ratio);
            }
            assert_eq!(scaled.len(), exact.len());
        }
    }

    #[test]
    fn warm_and_cold_cache_agree() {
        let warm = TransitionCache::new();
        warm.precompute(7);
        for kappa in enumerate_partitions(7) {
            assert_eq!(warm.transition_row(&kappa), transition_matrix_row(&kappa));
        }
    }

    #[test]
    fn debug_json_dump() {
        let json = zonal_monomial_coeffs(&p(&[2])).to_debug_json();
        assert_eq!(json["basis"], "monomial");
        assert_eq!(json["coeffs"]["1.1"], "2/3");
        assert_eq!(json["coeffs"]["2"], "1/1");
    }

    /// Determinant of a rational matrix by Gaussian elimination.
    fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
        let size = m.len();
        let mut det = Rational::one();
        for col in 0..size {
            let Some(pivot) = (col..size).find(|&r| !m[r][col].is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                m.swap(pivot, col);
                det = -det;
            }
            det *= m[col][col].clone();
            for r in col + 1..size {
                let factor = &m[r][col] / &m[col][col];
                let (upper, lower) = m.split_at_mut(r);
                for (target, pivot_entry) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *target -= &factor * pivot_entry;
                }
            }
        }
        det
    }

    #[test]
    fn transition_matrix_is_invertible() {
        let cache = TransitionCache::new();
        for n in 1..=8u32 {
            let parts = enumerate_partitions(n);
            let matrix = parts
                .iter()
                .map(|k| {
                    let row = cache.transition_row(k);
                    parts.iter().map(|mu| row.get(mu)).collect()
                })
                .collect();
            assert!(!determinant(matrix).is_zero(), "n = {n}");
        }
    }
}
