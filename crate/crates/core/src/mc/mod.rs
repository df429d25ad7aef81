//! Seeded Monte Carlo harness on the unit cube.
//!
//! Samplers for Poisson, mixed-sample and pairwise-interaction point
//! processes on `[0,1]^d` (`d ∈ {1, 2}`), subset-enumeration thinning for
//! configurations up to 22 points, and statistical verification of the
//! thinning and integration-by-parts identities.
//!
//! Everything is driven by a 64-bit seed: replica `i` draws from the
//! counter-based stream `(seed, i)`, so results are bit-identical for any
//! worker count — parallel runs split the replica range into fixed chunks
//! and reduce them in index order.

mod config;
mod error;
mod process;
mod stats;
mod thin;
mod verify;

pub use config::SimpleConfig;
pub use error::McError;
pub use process::{sample_process, sample_process_stream, PairPotential, ProcessSpec};
pub use stats::{chi_square_pvalue, gamma_p, MCEstimate, RunningStats};
pub use thin::{thin_config, thin_distribution, McThinning, SUBSET_CAP};
pub use verify::{
    mc_verify_ibp, mc_verify_poisson_thinning, CellReport, ChiSquareReport, GFunction,
    IbpMcReport, PoissonThinningReport,
};
