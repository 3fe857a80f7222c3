//! Brute-force spectral ground truth for very small `n`.
//!
//! Two constructions avoid zonal spherical functions entirely:
//!
//! - the Cayley graph of `S_2n` generated by all transpositions, whose
//!   filtered Laplacian kernel is averaged over cosets of `H_n`;
//! - the quotient graph on `X_n` itself, built from [`neighbors`].
//!
//! On the quotient graph every edge comes from exactly two transpositions
//! (and each of the `n` in-pair transpositions fixes the matching), so the
//! Cayley Laplacian restricted to `H_n`-invariant functions is twice the
//! quotient Laplacian. The scale is fitted, not assumed, and reported.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{Kappa, Kernel, KernelConfig, SpectralFilter};
use crate::matching::{act, all_matchings, neighbors, Matching, Permutation};
use crate::partition::enumerate_partitions;
use crate::sym_group::{dimension, laplacian_eigenvalue};

/// Largest `n` for the group-level construction (`|S_6| = 720`).
pub const GROUP_LIMIT: usize = 3;
/// Largest `n` for the quotient-graph construction (`|X_6| = 10395`).
pub const QUOTIENT_LIMIT: usize = 6;

/// A kernel matrix indexed by all matchings of `X_n`.
#[derive(Clone, Debug)]
pub struct MatchingKernel {
    pub matchings: Vec<Matching>,
    pub matrix: DMatrix<f64>,
}

impl MatchingKernel {
    fn normalize_diagonal(&mut self) {
        let diag: Vec<f64> = (0..self.matrix.nrows())
            .map(|i| self.matrix[(i, i)].sqrt())
            .collect();
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                self.matrix[(i, j)] /= diag[i] * diag[j];
            }
        }
    }
}

fn permutations(m: usize) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v as u32 + 1);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(m), &mut vec![false; m], &mut out);
    out
}

fn filtered_kernel(laplacian: DMatrix<f64>, scale: f64, filter: &SpectralFilter) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(laplacian);
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| filter.value((scale * l).max(0.0)))
        .collect();
    let u = &eig.eigenvectors;
    let mut scaled = u.clone();
    for (j, w) in weights.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*w);
    }
    scaled * u.transpose()
}

/// Group-level kernel on `S_2n`, projected to `X_n` by averaging over both
/// cosets and normalized to a unit diagonal.
pub fn group_kernel_projected(n: usize, filter: &SpectralFilter) -> Result<MatchingKernel> {
    if n == 0 || n > GROUP_LIMIT {
        return Err(Error::Capability {
            what: "group kernel oracle",
            n,
            limit: GROUP_LIMIT,
        });
    }
    let m = 2 * n;
    let elements = permutations(m);
    let index: HashMap<&[u32], usize> = elements
        .iter()
        .enumerate()
        .map(|(i, g)| (g.as_slice(), i))
        .collect();
    let size = elements.len();
    let degree = (m * (m - 1) / 2) as f64;
    let mut laplacian = DMatrix::<f64>::identity(size, size) * degree;
    for (i, g) in elements.iter().enumerate() {
        for a in 0..m {
            for b in a + 1..m {
                let mut h = g.clone();
                h.swap(a, b);
                laplacian[(i, index[h.as_slice()])] -= 1.0;
            }
        }
    }
    let group_kernel = filtered_kernel(laplacian, 1.0, filter);

    let matchings = all_matchings(n);
    let cell: HashMap<&Matching, usize> =
        matchings.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let x0 = Matching::base_point(n);
    let coset: Vec<usize> = elements
        .iter()
        .map(|g| {
            let sigma = Permutation::new(g.clone()).expect("valid permutation");
            cell[&act(&sigma, &x0).expect("sizes agree")]
        })
        .collect();
    let k = matchings.len();
    let mut matrix = DMatrix::<f64>::zeros(k, k);
    for i in 0..size {
        for j in 0..size {
            matrix[(coset[i], coset[j])] += group_kernel[(i, j)];
        }
    }
    let h = (size / k) as f64;
    matrix /= h * h;
    let mut out = MatchingKernel { matchings, matrix };
    out.normalize_diagonal();
    Ok(out)
}

/// Adjacency lists of the quotient Cayley graph on `X_n`.
pub fn quotient_graph(n: usize) -> (Vec<Matching>, Vec<Vec<usize>>) {
    let matchings = all_matchings(n);
    let index: HashMap<&Matching, usize> =
        matchings.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let adjacency = matchings
        .iter()
        .map(|x| neighbors(x).iter().map(|y| index[y]).collect())
        .collect();
    (matchings, adjacency)
}

/// Spectrum of the quotient-graph Laplacian compared to `{λ_{2ρ}}`.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientSpectrum {
    /// Sorted eigenvalues of `D − A`.
    pub eigenvalues: Vec<f64>,
    /// Fitted factor `s` with `s · λ_quotient ∈ {λ_{2ρ}}`.
    pub scale: f64,
    /// `(λ_{2ρ}, expected multiplicity Σ d_{2ρ}, observed multiplicity)`.
    pub multiplicities: Vec<(f64, usize, usize)>,
    /// Largest distance from a scaled eigenvalue to the nearest `λ_{2ρ}`.
    pub max_deviation: f64,
}

impl QuotientSpectrum {
    pub fn multiplicities_match(&self) -> bool {
        self.multiplicities.iter().all(|(_, want, got)| want == got)
    }
}

fn quotient_laplacian(n: usize) -> Result<(Vec<Matching>, DMatrix<f64>)> {
    if n == 0 || n > QUOTIENT_LIMIT {
        return Err(Error::Capability {
            what: "quotient graph oracle",
            n,
            limit: QUOTIENT_LIMIT,
        });
    }
    let (matchings, adjacency) = quotient_graph(n);
    let k = matchings.len();
    let mut laplacian = DMatrix::<f64>::zeros(k, k);
    for (i, nb) in adjacency.iter().enumerate() {
        laplacian[(i, i)] = nb.len() as f64;
        for &j in nb {
            laplacian[(i, j)] -= 1.0;
        }
    }
    Ok((matchings, laplacian))
}

/// Distinct `λ_{2ρ}` with the total dimension sharing each value.
fn target_spectrum(n: usize) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for rho in enumerate_partitions(n as u32) {
        let shape = rho.double();
        let lambda = laplacian_eigenvalue(&shape)
            .to_f64()
            .expect("finite eigenvalue");
        let d = dimension(&shape).to_usize().expect("small dimension");
        match out.iter_mut().find(|(l, _)| (l - lambda).abs() < 1e-9) {
            Some(entry) => entry.1 += d,
            None => out.push((lambda, d)),
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Eigendecomposes the quotient Laplacian and matches it against `{λ_{2ρ}}`.
pub fn quotient_spectrum(n: usize) -> Result<QuotientSpectrum> {
    let (_, laplacian) = quotient_laplacian(n)?;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(laplacian)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigenvalues.sort_by(f64::total_cmp);
    let targets = target_spectrum(n);
    let scale = match (
        eigenvalues.iter().find(|&&l| l > 1e-8),
        targets.iter().find(|(l, _)| *l > 0.0),
    ) {
        (Some(q), Some((t, _))) => t / q,
        _ => 1.0,
    };
    let mut observed = vec![0usize; targets.len()];
    let mut max_deviation: f64 = 0.0;
    for &l in &eigenvalues {
        let scaled = scale * l;
        let (best, dev) = targets
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (i, (t - scaled).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one target");
        observed[best] += 1;
        max_deviation = max_deviation.max(dev / targets[best].0.max(1.0));
    }
    let multiplicities = targets
        .iter()
        .zip(observed)
        .map(|(&(l, want), got)| (l, want, got))
        .collect();
    Ok(QuotientSpectrum {
        eigenvalues,
        scale,
        multiplicities,
        max_deviation,
    })
}

/// Filtered Laplacian kernel of the quotient graph with eigenvalues mapped
/// onto the Cayley scale, normalized to a unit diagonal.
pub fn quotient_graph_kernel(n: usize, filter: &SpectralFilter) -> Result<(MatchingKernel, f64)> {
    let scale = quotient_spectrum(n)?.scale;
    let (matchings, laplacian) = quotient_laplacian(n)?;
    let matrix = filtered_kernel(laplacian, scale, filter);
    let mut out = MatchingKernel { matchings, matrix };
    out.normalize_diagonal();
    Ok((out, scale))
}

/// Outcome of one oracle comparison.
#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub deviation: f64,
    pub tolerance: f64,
}

impl OracleCheck {
    fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: deviation <= tolerance,
            deviation,
            tolerance,
        }
    }
}

/// A batch of oracle checks.
#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleReport {
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn max_abs_difference(a: &MatchingKernel, kernel: &Kernel) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, x) in a.matchings.iter().enumerate() {
        for (j, y) in a.matchings.iter().enumerate() {
            worst = worst.max((a.matrix[(i, j)] - kernel.value(x, y)?).abs());
        }
    }
    Ok(worst)
}

fn untruncated_kernel(n: usize, filter: &SpectralFilter) -> Result<Kernel> {
    let config = KernelConfig::new(n as u32)
        .nu(filter.nu)
        .kappa(Kappa::Value(filter.kappa))
        .degree_correction(filter.degree_correction)
        .untruncated();
    Kernel::new(config)
}

/// Compares the group-level construction with the zonal spherical function
/// kernel over all pairs of matchings.
pub fn validate_spectral_identity(n: usize, filter: &SpectralFilter) -> Result<OracleCheck> {
    let brute = group_kernel_projected(n, filter)?;
    let kernel = untruncated_kernel(n, filter)?;
    Ok(OracleCheck::new(
        format!("spectral identity n={n}"),
        max_abs_difference(&brute, &kernel)?,
        1e-8,
    ))
}

/// Every oracle check available at this `n`.
pub fn run_all(n: usize, filter: &SpectralFilter) -> Result<OracleReport> {
    let mut report = OracleReport::default();
    let (_, adjacency) = quotient_graph(n);
    let degree = n * n.saturating_sub(1);
    let irregular = adjacency.iter().filter(|nb| nb.len() != degree).count();
    report.checks.push(OracleCheck::new(
        format!("quotient graph {degree}-regular"),
        irregular as f64,
        0.0,
    ));
    if n <= GROUP_LIMIT {
        report.checks.push(validate_spectral_identity(n, filter)?);
    }
    if n <= QUOTIENT_LIMIT {
        let spectrum = quotient_spectrum(n)?;
        report.checks.push(OracleCheck::new(
            format!("quotient spectrum scale {:.6}", spectrum.scale),
            spectrum.max_deviation,
            1e-8,
        ));
        let mismatched = spectrum
            .multiplicities
            .iter()
            .filter(|(_, want, got)| want != got)
            .count();
        report.checks.push(OracleCheck::new(
            "quotient multiplicities",
            mismatched as f64,
            0.0,
        ));
        let (quotient, _) = quotient_graph_kernel(n, filter)?;
        let kernel = untruncated_kernel(n, filter)?;
        report.checks.push(OracleCheck::new(
            "quotient kernel",
            max_abs_difference(&quotient, &kernel)?,
            1e-8,
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Nu;
    use crate::matching::generalized_distance;
    use crate::partition::Partition;

    #[test]
    fn group_kernel_depends_only_on_distance() {
        let f = SpectralFilter::new(Nu::Inf, 0.8, true, 3);
        let k = group_kernel_projected(3, &f).unwrap();
        let mut by_class: HashMap<Partition, f64> = HashMap::new();
        for (i, x) in k.matchings.iter().enumerate() {
            assert!((k.matrix[(i, i)] - 1.0).abs() < 1e-12);
            for (j, y) in k.matchings.iter().enumerate() {
                let mu = generalized_distance(x, y).unwrap();
                let v = *by_class.entry(mu).or_insert(k.matrix[(i, j)]);
                assert!((v - k.matrix[(i, j)]).abs() < 1e-10);
            }
        }
        assert_eq!(by_class.len(), 3);
    }

    #[test]
    fn n2_has_two_values() {
        let f = SpectralFilter::new(Nu::Inf, 1.0, true, 2);
        let k = group_kernel_projected(2, &f).unwrap();
        assert_eq!(k.matrix.nrows(), 3);
        let off = k.matrix[(0, 1)];
        assert!(off < 1.0);
        assert!((k.matrix[(1, 2)] - off).abs() < 1e-12);
        assert!(group_kernel_projected(4, &f).is_err());
    }

    #[test]
    fn spectral_identity_small() {
        for n in [2, 3] {
            for (nu, dc) in [
                (Nu::Inf, true),
                (Nu::Finite(1.5), true),
                (Nu::Finite(0.5), false),
            ] {
                let f = SpectralFilter::new(nu, 1.1, dc, n as u32);
                let check = validate_spectral_identity(n, &f).unwrap();
                assert!(check.passed, "n={n} nu={nu}: {}", check.deviation);
            }
        }
    }

    #[test]
    fn quotient_scale_is_two() {
        for n in 2..=4 {
            let s = quotient_spectrum(n).unwrap();
            assert!((s.scale - 2.0).abs() < 1e-9, "scale {}", s.scale);
            assert!(s.multiplicities_match(), "{:?}", s.multiplicities);
            assert!(s.eigenvalues[0].abs() < 1e-9);
        }
    }

    #[test]
    fn quotient_kernel_agrees() {
        let f = SpectralFilter::new(Nu::Finite(2.5), 0.9, true, 4);
        let report = run_all(4, &f).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}
