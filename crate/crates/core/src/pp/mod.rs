//! Exact calculus for finite point processes on a finite ground space.
//!
//! The ground space is a finite set of labeled sites with positive weights;
//! a point configuration is the multiset of site counts. Every measure and
//! kernel is then a finite table, and the identities of the counting calculus
//! — Bayes disintegration, the Palm representation of the splitting kernel,
//! integration by parts, the alternating cycle condition, and the layer
//! recursion inverting a thinning/condensation pair — become equalities of
//! finitely many numbers that are checked exactly here.

mod builders;
mod config;
mod cycle;
mod error;
mod ibp;
mod kernels;
mod measure;
mod reconstruct;
mod thinning;

pub use builders::{
    mixed_sample_measure, point_mass_measure, poisson_counts_measure, random_measure,
};
pub use config::{
    enumerate_configs, enumerate_configs_up_to, sub_multiplicity, GroundSpace, PointConfig,
};
pub use cycle::{kernel_cycle_violation, verify_cycle_kernels, PpCycleReport};
pub use error::PpError;
pub use ibp::{papangelou_kernel_exact, verify_ibp_exact};
pub use kernels::{
    condensation_atom, condensation_kernel, palm_splitting_kernel, reduced_palm, PpCondensation,
};
pub use measure::{ConfigMeasure, KernelTable};
pub use reconstruct::{reconstruct_pp, PpReconstruction};
pub use thinning::{thinning_kernel, thinning_normalization, thinning_table, ThinningSpec};
