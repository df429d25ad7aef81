use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pp::PpError;
use crate::scalar::{real, Real};
use crate::special::binomial_u128;

/// Largest configuration the exact multiset combinatorics accepts; keeps the
/// `u128` falling-factorial products from overflowing.
const POINT_CAP: usize = 30;

/// Cap on enumerated configuration spaces.
const ENUM_CAP: u128 = 10_000_000;

/// A finite ground space: labeled sites with positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundSpace<T> {
    weights: Vec<T>,
}

impl<T: Real> GroundSpace<T> {
    pub fn new(weights: Vec<T>) -> Result<Self, PpError> {
        if weights.is_empty() {
            return Err(PpError::EmptySpace);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !(w > T::zero()) || !w.is_finite() {
                return Err(PpError::BadSiteWeight {
                    index,
                    value: w.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self { weights })
    }

    pub fn site_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, site: usize) -> T {
        self.weights[site]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().copied().sum()
    }
}

/// A point configuration: the count of points at each site.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointConfig {
    counts: Vec<u32>,
}

impl PointConfig {
    pub fn new(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn empty(site_count: usize) -> Self {
        Self {
            counts: vec![0; site_count],
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn site_count(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, site: usize) -> u32 {
        self.counts[site]
    }

    /// Total number of points `|μ|`.
    pub fn total(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.counts.len() == other.counts.len()
            && self.counts.iter().zip(&other.counts).all(|(a, b)| a <= b)
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Componentwise difference, `None` unless `other ≤ self`.
    pub fn minus(&self, other: &Self) -> Option<Self> {
        if !other.le(self) {
            return None;
        }
        Some(Self {
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn with_added(&self, site: usize) -> Self {
        let mut counts = self.counts.clone();
        counts[site] += 1;
        Self { counts }
    }

    pub fn with_removed(&self, site: usize) -> Option<Self> {
        if self.counts[site] == 0 {
            return None;
        }
        let mut counts = self.counts.clone();
        counts[site] -= 1;
        Some(Self { counts })
    }

    /// All subconfigurations `η ≤ self`, odometer order.
    pub fn subconfigs(&self) -> Vec<PointConfig> {
        let mut out = Vec::new();
        let mut current = vec![0u32; self.counts.len()];
        loop {
            out.push(PointConfig::new(current.clone()));
            let mut site = 0;
            loop {
                if site == self.counts.len() {
                    return out;
                }
                if current[site] < self.counts[site] {
                    current[site] += 1;
                    break;
                }
                current[site] = 0;
                site += 1;
            }
        }
    }
}

impl fmt::Debug for PointConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.counts)
    }
}

impl fmt::Display for PointConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All configurations with exactly `n` points on `site_count` sites, listed
/// with the leading site exhausted first (deterministic order, each exactly
/// once). There are `C(n + s − 1, s − 1)` of them.
pub fn enumerate_configs(site_count: usize, n: usize) -> Result<Vec<PointConfig>, PpError> {
    if site_count == 0 {
        return Err(PpError::EmptySpace);
    }
    let count = binomial_u128((n + site_count - 1) as u64, (site_count - 1) as u64);
    if count > ENUM_CAP {
        return Err(PpError::ConfigSpaceTooLarge {
            count,
            cap: ENUM_CAP,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut scratch = vec![0u32; site_count];
    fill(&mut out, &mut scratch, 0, n);
    Ok(out)
}

fn fill(out: &mut Vec<PointConfig>, scratch: &mut Vec<u32>, site: usize, remaining: usize) {
    if site + 1 == scratch.len() {
        scratch[site] = remaining as u32;
        out.push(PointConfig::new(scratch.clone()));
        return;
    }
    for c in (0..=remaining).rev() {
        scratch[site] = c as u32;
        fill(out, scratch, site + 1, remaining - c);
    }
}

/// All configurations with at most `n_max` points, layer by layer.
pub fn enumerate_configs_up_to(
    site_count: usize,
    n_max: usize,
) -> Result<Vec<PointConfig>, PpError> {
    let mut out = Vec::new();
    for n in 0..=n_max {
        out.extend(enumerate_configs(site_count, n)?);
    }
    Ok(out)
}

/// The multiplicity `m(μ, η)`: the mass ordered `|η|`-tuples drawn from μ
/// without replacement put on the sub-multiset η,
/// `m(μ, η) = (|η|! / Π η_i!) · Π (μ_i)_(η_i)` with falling factorials.
/// Zero when `η ≰ μ`.
pub fn sub_multiplicity<T: Real>(mu: &PointConfig, eta: &PointConfig) -> Result<T, PpError> {
    if mu.site_count() != eta.site_count() {
        return Err(PpError::SiteCountMismatch {
            left: mu.site_count(),
            right: eta.site_count(),
        });
    }
    if !eta.le(mu) {
        return Ok(T::zero());
    }
    if mu.total() > POINT_CAP {
        return Err(PpError::ConfigTooLarge {
            size: mu.total(),
            cap: POINT_CAP,
        });
    }
    // Interleavings as a product of binomials keeps intermediates small.
    let mut value: u128 = 1;
    let mut placed: u64 = 0;
    for site in 0..eta.site_count() {
        let e = eta.count(site) as u64;
        placed += e;
        value *= binomial_u128(placed, e);
        let m = mu.count(site) as u64;
        for j in 0..e {
            value *= (m - j) as u128;
        }
    }
    Ok(real(value as f64))
}
