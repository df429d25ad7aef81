//! Numeric tolerances pinned for the whole crate.
//!
//! The values target `f64` on windows up to a few hundred states, one order
//! above accumulated double-precision rounding. Callers instantiating the
//! calculus at `f32` should pass explicit tolerances instead of relying on
//! these defaults.

use crate::scalar::{real, Real};

/// Row-stochasticity tolerance for triangular matrices.
pub fn row_tol<T: Real>() -> T {
    real(1e-12)
}

/// Balance-equation residual tolerance.
pub fn balance_tol<T: Real>() -> T {
    real(1e-11)
}

/// Alternating-cycle violation tolerance.
pub fn cycle_tol<T: Real>() -> T {
    real(1e-10)
}

/// Thinned mass at or below this level marks a row as unreachable; the
/// condensation row degenerates to a point mass.
pub fn pathological_tol<T: Real>() -> T {
    real(1e-14)
}

/// Weights below this level count as zero when checking that a support has
/// no holes.
pub fn hole_tol<T: Real>() -> T {
    real(1e-14)
}

/// Reconstructed total mass above this cap is reported as infinite.
pub fn mass_cap<T: Real>() -> T {
    real(1e12)
}
