//! Heat and Matérn kernels on the space of perfect matchings of `2n` points.
//!
//! The set of perfect matchings is the homogeneous space `S_2n / H_n`, and
//! every stationary kernel on it is a non-negative combination of zonal
//! spherical functions `φ_ρ`, one per partition `ρ ⊢ n`. This crate computes
//! those functions exactly (rational arithmetic) through zonal polynomials,
//! with two slower reference backends, and assembles truncated heat and
//! Matérn kernels from them.
//!
//! Module map:
//!
//! - [`partition`]: integer partitions, enumeration, truncation heuristics.
//! - [`sym_group`]: hook-length dimensions, Murnaghan–Nakayama characters,
//!   Cayley-graph Laplacian eigenvalues.
//! - [`matching`]: matchings, the `S_2n` action, generalized distance,
//!   generalized spheres and the quotient Cayley graph.
//! - [`symfunc`]: zonal polynomial coefficients and the monomial to
//!   power-sum basis change.
//! - [`zsf`]: zonal spherical function backends.
//! - [`kernel`]: spectral filters, truncation, kernel matrices and the
//!   closed-form approximation error.
//! - [`oracle`]: brute-force spectral constructions for tiny `n`.
//! - [`phylo`]: rooted binary trees, the Diaconis–Holmes bijection, the
//!   Richman-style embedding and NNI moves.
//! - [`cli`]: the `matchkern` command-line front end.

pub mod cli;
pub mod error;
pub mod kernel;
pub mod matching;
pub mod oracle;
pub mod partition;
pub mod phylo;
pub mod sym_group;
pub mod symfunc;
pub mod zsf;

mod fmt;

pub use error::{Error, Result};
pub use kernel::{Kappa, Kernel, KernelConfig, Nu};
pub use matching::{Matching, Permutation};
pub use partition::Partition;
pub use phylo::PhyloTree;
pub use zsf::{BackendKind, ZsfBackend};

/// Exact rational numbers used throughout the symbolic layers.
pub type Rational = num::BigRational;
