//! Built-in distribution families, thinning matrices, and the closed-form
//! condensations that serve as oracles against the Bayes route.

mod build;
mod closed_form;

pub use build::{make_dist, make_thinning, HARD_CAP};
pub use closed_form::{
    closed_form_condensation, power_law_condensation_entry, power_law_splitting_entry,
};

use serde::{Deserialize, Serialize};

use crate::dist::DistError;
use crate::scalar::Real;

/// Descriptor of a built-in law on ℕ₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistSpec<T> {
    Poisson { lambda: T },
    Binomial { r: u64, p: T },
    /// Mass `C(r+n−1, n) p^n (1−p)^r`, the convention whose birth ratio is
    /// `(r+n−1) p / n`.
    NegBinomial { r: T, p: T },
    /// Mass proportional to `(n+1)^(−α)`; needs `α > 1` to be summable.
    PowerLaw { alpha: T },
    PointMass { m: usize },
    Custom { weights: Vec<T> },
}

impl<T: Real> DistSpec<T> {
    pub fn validate(&self) -> Result<(), DistError> {
        let bad = |msg: String| Err(DistError::InvalidParameter(msg));
        match self {
            DistSpec::Poisson { lambda } => {
                if *lambda <= T::zero() || !lambda.is_finite() {
                    return bad(format!("poisson rate must be positive, got {lambda}"));
                }
            }
            DistSpec::Binomial { r, p } => {
                if *r == 0 {
                    return bad("binomial count must be at least 1".into());
                }
                if *p <= T::zero() || *p >= T::one() {
                    return bad(format!("binomial success probability must lie in (0,1), got {p}"));
                }
            }
            DistSpec::NegBinomial { r, p } => {
                if *r <= T::zero() || !r.is_finite() {
                    return bad(format!("negative binomial shape must be positive, got {r}"));
                }
                if *p <= T::zero() || *p >= T::one() {
                    return bad(format!(
                        "negative binomial success probability must lie in (0,1), got {p}"
                    ));
                }
            }
            DistSpec::PowerLaw { alpha } => {
                if *alpha <= T::one() || !alpha.is_finite() {
                    return bad(format!("power law exponent must exceed 1, got {alpha}"));
                }
            }
            DistSpec::PointMass { .. } => {}
            DistSpec::Custom { weights } => {
                if weights.is_empty() {
                    return Err(DistError::Empty);
                }
                if weights.iter().any(|w| *w < T::zero() || !w.is_finite()) {
                    return bad("custom weights must be non-negative and finite".into());
                }
                if weights.iter().all(|w| *w == T::zero()) {
                    return Err(DistError::ZeroMass);
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistSpec::Poisson { .. } => "poisson",
            DistSpec::Binomial { .. } => "binomial",
            DistSpec::NegBinomial { .. } => "negbinomial",
            DistSpec::PowerLaw { .. } => "powerlaw",
            DistSpec::PointMass { .. } => "pointmass",
            DistSpec::Custom { .. } => "custom",
        }
    }
}

/// Descriptor of a built-in thinning matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThinSpec<T> {
    /// Binomial rows: each of `n` items survives independently with
    /// probability `q`.
    Independent { q: T },
    /// Uniform rows `1/(n+1)`: a barrier dropped uniformly into the line of
    /// items, the discrete stick breaking.
    Uniform,
    /// Keeps everything with probability `q`, otherwise drops exactly one.
    AlmostNothing { q: T },
    /// Keeps everything with probability `q`, otherwise drops everything.
    AllOrNothing { q: T },
    /// Explicit lower-triangular rows; row `n` carries `n + 1` entries.
    Custom { rows: Vec<Vec<T>> },
}

impl<T: Real> ThinSpec<T> {
    pub fn validate(&self) -> Result<(), DistError> {
        match self {
            ThinSpec::Independent { q }
            | ThinSpec::AlmostNothing { q }
            | ThinSpec::AllOrNothing { q } => {
                if *q <= T::zero() || *q >= T::one() {
                    return Err(DistError::InvalidParameter(format!(
                        "thinning probability must lie in (0,1), got {q}"
                    )));
                }
                Ok(())
            }
            ThinSpec::Uniform => Ok(()),
            ThinSpec::Custom { rows } => {
                if rows.is_empty() {
                    return Err(DistError::Empty);
                }
                Ok(())
            }
        }
    }

    /// Positive thinnings put mass on every level below the current one.
    pub fn is_positive(&self) -> bool {
        matches!(self, ThinSpec::Independent { .. } | ThinSpec::Uniform)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ThinSpec::Independent { .. } => "independent",
            ThinSpec::Uniform => "uniform",
            ThinSpec::AlmostNothing { .. } => "almost_nothing",
            ThinSpec::AllOrNothing { .. } => "all_or_nothing",
            ThinSpec::Custom { .. } => "custom",
        }
    }
}
