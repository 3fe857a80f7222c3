//! Characters of the symmetric group `S_m`.
//!
//! Dimensions come from the hook length formula, character values from the
//! Murnaghan–Nakayama rule with border strips removed through the beta-set
//! (abacus) encoding of a shape: a strip of size `k` starting in row `i`
//! exists iff `β_i − k ≥ 0` is not already a beta number, and its height is
//! the count of beta numbers strictly between `β_i − k` and `β_i`.

use std::collections::HashMap;
use std::sync::OnceLock;

use num::{BigInt, BigUint, One, Signed, Zero};
use parking_lot::RwLock;

use crate::partition::Partition;
use crate::Rational;

/// `m!` as a big integer.
pub fn factorial(m: u32) -> BigUint {
    (1..=m).fold(BigUint::one(), |acc, k| acc * k)
}

/// Dimension `d_ρ = m! / ∏ hook(c)` of the irreducible representation of
/// `S_m` indexed by `ρ ⊢ m`.
pub fn dimension(shape: &Partition) -> BigUint {
    let conj = shape.conjugate();
    let mut hooks = BigUint::one();
    for (i, &row) in shape.parts().iter().enumerate() {
        for j in 0..row as usize {
            let arm = row as usize - j - 1;
            let leg = conj.parts()[j] as usize - i - 1;
            hooks *= (arm + leg + 1) as u64;
        }
    }
    factorial(shape.size()) / hooks
}

fn beta_set(shape: &[u32]) -> Vec<u32> {
    let s = shape.len() as u32;
    shape
        .iter()
        .enumerate()
        .map(|(i, &p)| p + (s - 1 - i as u32))
        .collect()
}

fn shape_from_beta(beta: &mut [u32]) -> Partition {
    beta.sort_unstable_by(|a, b| b.cmp(a));
    let s = beta.len() as u32;
    let parts = beta
        .iter()
        .enumerate()
        .map(|(i, &b)| b - (s - 1 - i as u32))
        .filter(|&p| p > 0)
        .collect();
    Partition::from_sorted_unchecked(parts)
}

/// All border strips of size `k` removable from `shape`, as
/// `(remaining shape, height)`; at most one per starting row.
pub fn border_strips(shape: &Partition, k: u32) -> Vec<(Partition, u32)> {
    let beta = beta_set(shape.parts());
    let mut out = Vec::new();
    for (i, &b) in beta.iter().enumerate() {
        if b < k {
            continue;
        }
        let target = b - k;
        if beta.contains(&target) {
            continue;
        }
        let height = beta.iter().filter(|&&x| x > target && x < b).count() as u32;
        let mut next = beta.clone();
        next[i] = target;
        out.push((shape_from_beta(&mut next), height));
    }
    out
}

/// Memoized character table of symmetric groups, keyed by
/// (remaining shape, remaining cycle type).
#[derive(Debug, Default)]
pub struct CharacterTable {
    cache: RwLock<HashMap<(Partition, Partition), BigInt>>,
}

impl CharacterTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `χ^{(shape)}(class)`; both partitions must have the same size.
    pub fn value(&self, shape: &Partition, class: &Partition) -> BigInt {
        assert_eq!(
            shape.size(),
            class.size(),
            "character of {shape} at class {class}: sizes differ"
        );
        self.eval(shape, class.parts())
    }

    fn eval(&self, shape: &Partition, class: &[u32]) -> BigInt {
        let Some((&first, rest)) = class.split_first() else {
            return BigInt::one();
        };
        if first == 1 {
            // Identity class.
            return BigInt::from(dimension(shape));
        }
        let key = (
            shape.clone(),
            Partition::from_sorted_unchecked(class.to_vec()),
        );
        if let Some(v) = self.cache.read().get(&key) {
            return v.clone();
        }
        let mut total = BigInt::zero();
        for (sub, height) in border_strips(shape, first) {
            let v = self.eval(&sub, rest);
            if height % 2 == 0 {
                total += v;
            } else {
                total -= v;
            }
        }
        self.cache
            .write()
            .entry(key)
            .or_insert_with(|| total.clone());
        total
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.read().len()
    }
}

fn global_table() -> &'static CharacterTable {
    static TABLE: OnceLock<CharacterTable> = OnceLock::new();
    TABLE.get_or_init(CharacterTable::new)
}

/// `χ^{(shape)}(class)` through a process-wide memo table.
pub fn character(shape: &Partition, class: &Partition) -> BigInt {
    global_table().value(shape, class)
}

/// `χ^{(shape)}` at a transposition, from size-2 border strips and
/// dimensions of the remaining shapes only.
pub fn character_at_transposition(shape: &Partition) -> BigInt {
    border_strips(shape, 2)
        .into_iter()
        .map(|(sub, h)| {
            let d = BigInt::from(dimension(&sub));
            if h % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .sum()
}

/// Number of transpositions in `S_m`.
pub fn transposition_count(m: u32) -> u64 {
    m as u64 * (m as u64 - 1) / 2
}

/// Eigenvalue `λ_ρ = |W|/d_ρ · (d_ρ − χ^{(ρ)}(τ))` of the Laplacian of the
/// Cayley graph of `S_m` generated by all transpositions `W`, for the
/// isotypic component of `ρ ⊢ m`, `m ≥ 2`.
pub fn laplacian_eigenvalue(shape: &Partition) -> Rational {
    let m = shape.size();
    assert!(m >= 2, "Laplacian eigenvalue needs m >= 2, got {m}");
    let d = BigInt::from(dimension(shape));
    let chi = character_at_transposition(shape);
    let w = BigInt::from(transposition_count(m));
    let value = Rational::new(w * (&d - chi), d);
    debug_assert!(!value.is_negative());
    value
}

/// Size of the conjugacy class of `S_m` with the given cycle type.
pub fn class_size(cycle_type: &Partition) -> BigUint {
    let mut denom = BigUint::one();
    for (k, t) in cycle_type.multiplicities() {
        denom *= BigUint::from(k).pow(t) * factorial(t);
    }
    factorial(cycle_type.size()) / denom
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_partitions;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(dimension(&p(&[5])), BigUint::one());
        assert_eq!(dimension(&p(&[2, 2])), BigUint::from(2u32));
        assert_eq!(dimension(&Partition::column(6)), BigUint::one());
        assert_eq!(dimension(&p(&[3, 1])), BigUint::from(3u32));
        assert_eq!(dimension(&p(&[3, 2, 1])), BigUint::from(16u32));
    }

    #[test]
    fn character_examples() {
        assert_eq!(character(&p(&[1, 1]), &p(&[2])), BigInt::from(-1));
        assert_eq!(character(&p(&[3, 1]), &p(&[2, 1, 1])), BigInt::from(1));
        for class in enumerate_partitions(5) {
            assert_eq!(character(&p(&[5]), &class), BigInt::one());
        }
        assert_eq!(character(&p(&[2, 2]), &p(&[2, 1, 1])), BigInt::zero());
    }

    #[test]
    fn standard_representation_is_fixed_points_minus_one() {
        let shape = p(&[4, 1]);
        for class in enumerate_partitions(5) {
            let fixed = class.parts().iter().filter(|&&c| c == 1).count() as i64;
            assert_eq!(character(&shape, &class), BigInt::from(fixed - 1));
        }
    }

    #[test]
    fn eigenvalue_examples() {
        assert!(laplacian_eigenvalue(&p(&[4])).is_zero());
        assert_eq!(
            laplacian_eigenvalue(&p(&[3, 1])),
            Rational::from_integer(4.into())
        );
        assert_eq!(
            laplacian_eigenvalue(&Partition::column(4)),
            Rational::from_integer(12.into())
        );
        assert_eq!(
            laplacian_eigenvalue(&p(&[2, 2])),
            Rational::from_integer(6.into())
        );
    }

    #[test]
    fn eigenvalue_matches_content_sum() {
        // λ_ρ = |W| − Σ_{cells} (col − row), an independent closed form.
        for m in 2..=14u32 {
            for shape in enumerate_partitions(m) {
                let contents: i64 = shape
                    .parts()
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &r)| (0..r as i64).map(move |j| j - i as i64))
                    .sum();
                let want = transposition_count(m) as i64 - contents;
                assert_eq!(
                    laplacian_eigenvalue(&shape),
                    Rational::from_integer(want.into())
                );
            }
        }
    }

    #[test]
    fn border_strips_of_two_two() {
        let strips = border_strips(&p(&[2, 2]), 2);
        assert_eq!(strips, vec![(p(&[1, 1]), 1), (p(&[2]), 0)]);
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for m in 1..=8 {
            let total: BigUint = enumerate_partitions(m).iter().map(class_size).sum();
            assert_eq!(total, factorial(m));
        }
    }
}
