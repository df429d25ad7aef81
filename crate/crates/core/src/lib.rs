//! Thinning, condensation and splitting calculus for counting distributions
//! and finite point processes.
//!
//! A thinning takes a random population (a count in ℕ₀, or a finite point
//! configuration) to a random sub-population; the condensation is its Bayesian
//! inverse, the conditional law of the whole population given the observed
//! sub-sample; the splitting is the conditional law of the remainder. This
//! crate computes all three exactly on finite windows, verifies the identities
//! that tie them together (balance equations, integration by parts, detailed
//! balance, alternating cycle conditions), and reconstructs the original law
//! from a thinning/condensation pair.
//!
//! The crate is organised in three layers:
//!
//! * [`dist`] — the calculus for distributions on ℕ₀, carried on a truncated
//!   window with tracked tail error. [`zoo`] supplies the built-in model
//!   families (Poisson, binomial, negative binomial, power law, point mass)
//!   and their closed-form condensations, which double as oracles.
//! * [`pp`] — the same calculus for finite point processes over a finite
//!   ground space, where every kernel is a finite table and every identity an
//!   equality of finitely many numbers.
//! * [`mc`] — a seeded Monte Carlo harness for processes on `[0,1]^d`
//!   (Poisson, mixed sample, pairwise interaction), with subset-enumeration
//!   thinning and statistical verification of the integration-by-parts
//!   identities.
//!
//! The numeric core is generic over the floating-point scalar through
//! [`scalar::Real`]; the aliases below pin the common `f64` instantiations.
//! The Monte Carlo harness works in `f64` throughout.

// Validation sites use `!(x > 0)`-style comparisons on purpose: the negated
// form fails closed on NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dist;
pub mod mc;
pub mod pp;
pub mod scalar;
pub mod special;
pub mod tol;
pub mod zoo;

pub use scalar::Real;

/// `f64` law on a truncated window.
pub type TruncatedPmf64 = dist::TruncatedPmf<f64>;
/// `f64` triangular stochastic matrix.
pub type TriMatrix64 = dist::TriMatrix<f64>;
/// `f64` splitting view of an upper-triangular matrix.
pub type SplitView64<'a> = dist::SplitView<'a, f64>;
/// `f64` Papangelou sequence.
pub type PapangelouSeq64 = dist::PapangelouSeq<f64>;
/// `f64` distribution descriptor.
pub type DistSpec64 = zoo::DistSpec<f64>;
/// `f64` thinning descriptor.
pub type ThinSpec64 = zoo::ThinSpec<f64>;
/// `f64` ground space.
pub type GroundSpace64 = pp::GroundSpace<f64>;
/// `f64` measure on point configurations.
pub type ConfigMeasure64 = pp::ConfigMeasure<f64>;
/// `f64` kernel table.
pub type KernelTable64 = pp::KernelTable<f64>;
/// `f64` point-process thinning descriptor.
pub type ThinningSpec64 = pp::ThinningSpec<f64>;
