//! Heat and Matérn kernels on perfect matchings.
//!
//! A kernel is a weighted sum of zonal spherical functions,
//! `k(x, y) = Z⁻¹ Σ_{ρ ∈ R} w_ρ φ_ρ(d(x, y))` with
//! `w_ρ = Φ(λ_{2ρ}) d_{2ρ} / (2n)!`, where `λ_{2ρ}` and `d_{2ρ}` are the
//! Laplacian eigenvalue and dimension attached to `2ρ ⊢ 2n`. The constant
//! `Z = Σ_R w_ρ` makes the diagonal exactly one.
//!
//! Weights are handled in log space and rescaled by their maximum, so very
//! large Matérn exponents do not underflow.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use num::{BigUint, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{distance_from_partners, Matching};
use crate::partition::{
    enumerate_partitions, select_truncation_with, Partition, TruncationHeuristic,
};
use crate::sym_group::{dimension, factorial, laplacian_eigenvalue};
use crate::zsf::{BackendKind, ZsfBackend};
use crate::Rational;

/// Truncation size used when none is given.
pub const DEFAULT_TRUNCATION: usize = 30;

/// Smoothness parameter: `Inf` selects the heat filter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Nu {
    Inf,
    Finite(f64),
}

impl fmt::Display for Nu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nu::Inf => f.write_str("inf"),
            Nu::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Nu {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity" | "heat") {
            return Ok(Nu::Inf);
        }
        let v: f64 = s.parse().map_err(|_| {
            Error::InvalidArgument(format!("nu must be a number or \"inf\", got {s:?}"))
        })?;
        if v.is_infinite() && v > 0.0 {
            return Ok(Nu::Inf);
        }
        if v.is_nan() || v <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "nu must be positive, got {v}"
            )));
        }
        Ok(Nu::Finite(v))
    }
}

/// Lengthscale, explicit or chosen by the coefficient-ratio heuristic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Kappa {
    Auto,
    Value(f64),
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kappa::Auto => f.write_str("auto"),
            Kappa::Value(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Kappa {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Kappa::Auto);
        }
        let v: f64 = s.parse().map_err(|_| {
            Error::InvalidArgument(format!("kappa must be a number or \"auto\", got {s:?}"))
        })?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kappa must be positive, got {v}"
            )));
        }
        Ok(Kappa::Value(v))
    }
}

/// A spectral filter `Φ` with all parameters resolved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFilter {
    pub nu: Nu,
    pub kappa: f64,
    pub degree_correction: bool,
    /// Matérn exponent (`ν`, or `ν + n(n−1)/2` with degree correction);
    /// unused by the heat filter.
    pub exponent: f64,
}

impl SpectralFilter {
    pub fn new(nu: Nu, kappa: f64, degree_correction: bool, n: u32) -> Self {
        Self {
            nu,
            kappa,
            degree_correction,
            exponent: matern_exponent(nu, degree_correction, n),
        }
    }

    /// `ln Φ(λ)`.
    pub fn log_value(&self, lambda: f64) -> f64 {
        let k2 = self.kappa * self.kappa;
        match self.nu {
            Nu::Inf => -k2 * lambda / 2.0,
            Nu::Finite(nu) => -self.exponent * (2.0 * nu / k2 + lambda).ln(),
        }
    }

    /// `Φ(λ)`.
    pub fn value(&self, lambda: f64) -> f64 {
        self.log_value(lambda).exp()
    }
}

fn matern_exponent(nu: Nu, degree_correction: bool, n: u32) -> f64 {
    match nu {
        Nu::Inf => f64::INFINITY,
        Nu::Finite(v) if degree_correction => v + (n as f64) * (n as f64 - 1.0) / 2.0,
        Nu::Finite(v) => v,
    }
}

/// `Φ(λ)` for the given parameters.
pub fn filter(nu: Nu, kappa: f64, degree_correction: bool, n: u32, lambda: f64) -> f64 {
    SpectralFilter::new(nu, kappa, degree_correction, n).value(lambda)
}

/// Lengthscale at which the `(n)` term carries twice the weight of the
/// `(n−1, 1)` term. Requires `n ≥ 2`.
pub fn auto_kappa(nu: Nu, degree_correction: bool, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "automatic kappa needs n >= 2, got n = {n}"
        )));
    }
    let shape = Partition::new(vec![n - 1, 1])?.double();
    let lambda2 = to_f64(&laplacian_eigenvalue(&shape));
    let d2 = dimension(&shape).to_f64().expect("dimension fits f64");
    let k2 = match nu {
        Nu::Inf => 2.0 * (2.0 * d2).ln() / lambda2,
        Nu::Finite(v) => {
            let e = matern_exponent(nu, degree_correction, n);
            2.0 * v * ((2.0 * d2).ln() / e).exp_m1() / lambda2
        }
    };
    Ok(k2.sqrt())
}

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().expect("rational converts to f64")
}

/// Natural logarithm of a big integer, exact to double precision.
pub(crate) fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("small BigUint").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("64-bit head").ln() + shift as f64 * std::f64::consts::LN_2
}

/// One summand of the truncated kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralTerm {
    pub rho: Partition,
    /// `λ_{2ρ}`.
    pub eigenvalue: Rational,
    /// `d_{2ρ}`.
    pub dim: BigUint,
    /// `ln(Φ(λ_{2ρ}) d_{2ρ} / (2n)!)`.
    pub log_weight: f64,
    /// `Φ(λ_{2ρ}) d_{2ρ} / (2n)!`; may underflow to zero.
    pub weight: f64,
    /// Weight divided by the largest weight in the same term list.
    pub relative_weight: f64,
}

/// Terms for the given partitions, sorted by descending weight.
pub fn terms_for(rhos: &[Partition], filter: &SpectralFilter) -> Vec<SpectralTerm> {
    let mut terms: Vec<SpectralTerm> = rhos
        .iter()
        .map(|rho| {
            let shape = rho.double();
            let eigenvalue = if shape.size() >= 2 {
                laplacian_eigenvalue(&shape)
            } else {
                Rational::from_integer(0.into())
            };
            let dim = dimension(&shape);
            let log_weight = filter.log_value(to_f64(&eigenvalue)) + ln_big(&dim)
                - ln_big(&factorial(shape.size()));
            SpectralTerm {
                rho: rho.clone(),
                eigenvalue,
                dim,
                log_weight,
                weight: log_weight.exp(),
                relative_weight: 0.0,
            }
        })
        .collect();
    let max = terms
        .iter()
        .map(|t| t.log_weight)
        .fold(f64::NEG_INFINITY, f64::max);
    for t in &mut terms {
        t.relative_weight = (t.log_weight - max).exp();
    }
    terms.sort_by(|a, b| {
        b.log_weight
            .total_cmp(&a.log_weight)
            .then_with(|| b.rho.cmp(&a.rho))
    });
    terms
}

/// Everything that determines a kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub n: u32,
    pub nu: Nu,
    pub kappa: Kappa,
    /// Explicit truncation set; when `None`, `truncation_size` partitions are
    /// selected with `heuristic`.
    pub truncation: Option<Vec<Partition>>,
    pub truncation_size: Option<usize>,
    pub heuristic: TruncationHeuristic,
    pub degree_correction: bool,
    pub backend: BackendKind,
}

impl KernelConfig {
    /// Heat kernel, automatic lengthscale, default truncation, zonal
    /// polynomial backend.
    pub fn new(n: u32) -> Self {
        Self {
            n,
            nu: Nu::Inf,
            kappa: Kappa::Auto,
            truncation: None,
            truncation_size: None,
            heuristic: TruncationHeuristic::default(),
            degree_correction: true,
            backend: BackendKind::Zp,
        }
    }

    pub fn nu(mut self, nu: Nu) -> Self {
        self.nu = nu;
        self
    }

    pub fn kappa(mut self, kappa: Kappa) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn truncation(mut self, rhos: Vec<Partition>) -> Self {
        self.truncation = Some(rhos);
        self
    }

    /// Keep every partition of `n`.
    pub fn untruncated(self) -> Self {
        let all = enumerate_partitions(self.n);
        self.truncation(all)
    }

    pub fn truncation_size(mut self, size: usize) -> Self {
        self.truncation_size = Some(size);
        self
    }

    pub fn heuristic(mut self, heuristic: TruncationHeuristic) -> Self {
        self.heuristic = heuristic;
        self
    }

    pub fn degree_correction(mut self, on: bool) -> Self {
        self.degree_correction = on;
        self
    }

    pub fn backend(mut self, backend: BackendKind) -> Self {
        self.backend = backend;
        self
    }

    /// Lengthscale after resolving `auto`. With `n = 1` every lengthscale
    /// gives the same kernel and `1` is returned.
    pub fn resolved_kappa(&self) -> Result<f64> {
        match self.kappa {
            Kappa::Value(v) if v > 0.0 && v.is_finite() => Ok(v),
            Kappa::Value(v) => Err(Error::InvalidArgument(format!(
                "kappa must be positive, got {v}"
            ))),
            Kappa::Auto if self.n < 2 => Ok(1.0),
            Kappa::Auto => auto_kappa(self.nu, self.degree_correction, self.n),
        }
    }

    pub fn resolved_filter(&self) -> Result<SpectralFilter> {
        if let Nu::Finite(v) = self.nu {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "nu must be positive, got {v}"
                )));
            }
        }
        Ok(SpectralFilter::new(
            self.nu,
            self.resolved_kappa()?,
            self.degree_correction,
            self.n,
        ))
    }

    /// The truncation set `R` after applying defaults.
    pub fn resolved_truncation(&self) -> Result<Vec<Partition>> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        match &self.truncation {
            Some(rhos) => {
                if rhos.is_empty() {
                    return Err(Error::InvalidArgument("truncation set is empty".into()));
                }
                if let Some(bad) = rhos.iter().find(|r| r.size() != self.n) {
                    return Err(Error::PartitionSizeMismatch {
                        left: bad.size(),
                        right: self.n,
                    });
                }
                let mut unique = rhos.clone();
                unique.sort();
                unique.dedup();
                Ok(unique)
            }
            None => {
                let total = enumerate_partitions(self.n).len();
                let size = self
                    .truncation_size
                    .unwrap_or(DEFAULT_TRUNCATION.min(total));
                select_truncation_with(self.n, size, self.heuristic)
            }
        }
    }
}

/// Spectral terms of a configuration, sorted by descending weight.
pub fn spectral_terms(config: &KernelConfig) -> Result<Vec<SpectralTerm>> {
    Ok(terms_for(
        &config.resolved_truncation()?,
        &config.resolved_filter()?,
    ))
}

/// A ready-to-evaluate kernel: all zonal spherical function values needed
/// are computed at construction, leaving one lookup per query.
#[derive(Debug)]
pub struct Kernel {
    config: KernelConfig,
    filter: SpectralFilter,
    terms: Vec<SpectralTerm>,
    values: HashMap<Partition, f64>,
}

impl Kernel {
    /// Builds a kernel with a fresh backend of the configured kind.
    pub fn new(config: KernelConfig) -> Result<Self> {
        let backend = config.backend.build();
        Self::with_backend(config, backend)
    }

    /// Builds a kernel with a caller-supplied backend, whose caches may be
    /// shared with other kernels.
    pub fn with_backend(config: KernelConfig, backend: Arc<dyn ZsfBackend>) -> Result<Self> {
        let filter = config.resolved_filter()?;
        let terms = terms_for(&config.resolved_truncation()?, &filter);
        let tables = terms
            .iter()
            .map(|t| backend.table(&t.rho))
            .collect::<Result<Vec<_>>>()?;
        let z: f64 = terms.iter().map(|t| t.relative_weight).sum();
        let values = enumerate_partitions(config.n)
            .into_iter()
            .map(|mu| {
                let sum: f64 = terms
                    .iter()
                    .zip(&tables)
                    .map(|(t, table)| t.relative_weight * to_f64(&table[&mu]))
                    .sum();
                (mu, sum / z)
            })
            .collect();
        Ok(Self {
            config,
            filter,
            terms,
            values,
        })
    }

    pub fn config(&self) -> &KernelConfig {
        &self.config
    }

    pub fn filter(&self) -> &SpectralFilter {
        &self.filter
    }

    pub fn terms(&self) -> &[SpectralTerm] {
        &self.terms
    }

    pub fn n(&self) -> u32 {
        self.config.n
    }

    /// Kernel value at generalized distance `μ`.
    pub fn value_at_distance(&self, mu: &Partition) -> Result<f64> {
        self.values
            .get(mu)
            .copied()
            .ok_or(Error::PartitionSizeMismatch {
                left: mu.size(),
                right: self.config.n,
            })
    }

    /// `k(x, y)`.
    pub fn value(&self, x: &Matching, y: &Matching) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.values[&distance_from_partners(&x.partners(), &y.partners())])
    }

    fn check(&self, x: &Matching) -> Result<()> {
        if x.n() != self.config.n as usize {
            return Err(Error::SizeMismatch {
                expected: self.config.n as usize,
                found: x.n(),
            });
        }
        Ok(())
    }

    /// Gram matrix of `xs`, computed in parallel over rows.
    pub fn matrix(&self, xs: &[Matching]) -> Result<DMatrix<f64>> {
        for x in xs {
            self.check(x)?;
        }
        let partners: Vec<Vec<usize>> = xs.iter().map(Matching::partners).collect();
        let rows: Vec<Vec<f64>> = (0..xs.len())
            .into_par_iter()
            .map(|i| {
                (i..xs.len())
                    .map(|j| self.values[&distance_from_partners(&partners[i], &partners[j])])
                    .collect()
            })
            .collect();
        let m = xs.len();
        let mut out = DMatrix::zeros(m, m);
        for (i, row) in rows.into_iter().enumerate() {
            for (offset, v) in row.into_iter().enumerate() {
                out[(i, i + offset)] = v;
                out[(i + offset, i)] = v;
            }
        }
        Ok(out)
    }
}

/// `ln(Φ(λ_{2ρ})² d_{2ρ})` for every `ρ ⊢ n`, lexicographically descending.
fn log_densities(n: u32, filter: &SpectralFilter) -> Vec<(Partition, f64, f64)> {
    enumerate_partitions(n)
        .into_iter()
        .map(|rho| {
            let shape = rho.double();
            let lambda = if shape.size() >= 2 {
                to_f64(&laplacian_eigenvalue(&shape))
            } else {
                0.0
            };
            let log = 2.0 * filter.log_value(lambda) + ln_big(&dimension(&shape));
            (rho, lambda, log)
        })
        .collect()
}

/// Relative `L²` error of truncating the kernel to `R`:
/// `√(Σ_{ρ∉R} Φ(λ_{2ρ})² d_{2ρ} / Σ_ρ Φ(λ_{2ρ})² d_{2ρ})`.
pub fn approximation_error(
    n: u32,
    nu: Nu,
    kappa: Kappa,
    degree_correction: bool,
    truncation: &[Partition],
) -> Result<f64> {
    let filter = KernelConfig::new(n)
        .nu(nu)
        .kappa(kappa)
        .degree_correction(degree_correction)
        .resolved_filter()?;
    Ok(approximation_error_with(n, &filter, truncation))
}

/// [`approximation_error`] for an already resolved filter.
pub fn approximation_error_with(n: u32, filter: &SpectralFilter, truncation: &[Partition]) -> f64 {
    let rows = log_densities(n, filter);
    let max = rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let keep: std::collections::HashSet<&Partition> = truncation.iter().collect();
    let mut total = 0.0;
    let mut outside = 0.0;
    for (rho, _, log) in &rows {
        let v = (log - max).exp();
        total += v;
        if !keep.contains(rho) {
            outside += v;
        }
    }
    (outside / total).sqrt()
}

/// One row of the spectral density report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub rho: Partition,
    pub eigenvalue: f64,
    /// `ln(Φ(λ_{2ρ})² d_{2ρ})`.
    pub log_density: f64,
}

/// `(λ_{2ρ}, ln(Φ(λ_{2ρ})² d_{2ρ}))` for all `ρ ⊢ n`.
pub fn spectral_density_report(
    n: u32,
    nu: Nu,
    kappa: Kappa,
    degree_correction: bool,
) -> Result<Vec<DensityRow>> {
    let filter = KernelConfig::new(n)
        .nu(nu)
        .kappa(kappa)
        .degree_correction(degree_correction)
        .resolved_filter()?;
    Ok(log_densities(n, &filter)
        .into_iter()
        .map(|(rho, eigenvalue, log_density)| DensityRow {
            rho,
            eigenvalue,
            log_density,
        })
        .collect())
}
