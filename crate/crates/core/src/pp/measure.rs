use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::pp::{PointConfig, PpError};
use crate::scalar::Real;

/// A finitely supported measure on point configurations. Only strictly
/// positive atoms are stored; iteration order is the configuration order,
/// so reductions are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigMeasure<T> {
    site_count: usize,
    weights: BTreeMap<PointConfig, T>,
    normalized: bool,
}

impl<T: Real> ConfigMeasure<T> {
    pub fn new(site_count: usize) -> Self {
        Self {
            site_count,
            weights: BTreeMap::new(),
            normalized: false,
        }
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    /// Adds mass at a configuration; exact zeros are dropped.
    pub fn insert(&mut self, config: PointConfig, weight: T) -> Result<(), PpError> {
        if config.site_count() != self.site_count {
            return Err(PpError::SiteCountMismatch {
                left: config.site_count(),
                right: self.site_count,
            });
        }
        if !(weight >= T::zero()) || !weight.is_finite() {
            return Err(PpError::BadWeight {
                config: config.to_string(),
            });
        }
        if weight > T::zero() {
            *self.weights.entry(config).or_insert_with(T::zero) += weight;
        }
        Ok(())
    }

    pub fn mass(&self, config: &PointConfig) -> T {
        self.weights.get(config).copied().unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.weights.values().copied().sum()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PointConfig, T)> {
        self.weights.iter().map(|(c, &w)| (c, w))
    }

    pub fn configs(&self) -> impl Iterator<Item = &PointConfig> {
        self.weights.keys()
    }

    /// Largest total count carried by the support.
    pub fn max_total(&self) -> usize {
        self.weights.keys().map(|c| c.total()).max().unwrap_or(0)
    }

    /// Mass of the layer `{|μ| = n}`.
    pub fn layer_mass(&self, n: usize) -> T {
        self.weights
            .iter()
            .filter(|(c, _)| c.total() == n)
            .map(|(_, &w)| w)
            .sum()
    }

    /// The measure rescaled to unit total mass.
    pub fn normalized(&self) -> Result<Self, PpError> {
        let total = self.total();
        if !(total > T::zero()) {
            return Err(PpError::ZeroMass);
        }
        let weights = self
            .weights
            .iter()
            .map(|(c, &w)| (c.clone(), w / total))
            .collect();
        Ok(Self {
            site_count: self.site_count,
            weights,
            normalized: true,
        })
    }

    pub fn scaled(&self, factor: T) -> Self {
        let weights = self
            .weights
            .iter()
            .map(|(c, &w)| (c.clone(), w * factor))
            .collect();
        Self {
            site_count: self.site_count,
            weights,
            normalized: false,
        }
    }

    /// Total-variation distance; missing atoms count as zero.
    pub fn tv_distance(&self, other: &Self) -> T {
        let two = T::one() + T::one();
        self.abs_diff_sum(other) / two
    }

    /// Largest atomwise deviation.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for (c, w) in self.iter() {
            worst = worst.max((w - other.mass(c)).abs());
        }
        for (c, w) in other.iter() {
            worst = worst.max((w - self.mass(c)).abs());
        }
        worst
    }

    fn abs_diff_sum(&self, other: &Self) -> T {
        let mut acc = T::zero();
        for (c, w) in self.iter() {
            acc += (w - other.mass(c)).abs();
        }
        for (c, w) in other.iter() {
            if self.mass(c) == T::zero() {
                acc += w;
            }
        }
        acc
    }
}

impl<T: Real + Serialize> Serialize for ConfigMeasure<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Atom<'a, T> {
            counts: &'a [u32],
            weight: T,
        }
        let mut seq = serializer.serialize_seq(Some(self.weights.len()))?;
        for (config, &weight) in &self.weights {
            seq.serialize_element(&Atom {
                counts: config.counts(),
                weight,
            })?;
        }
        seq.end()
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for ConfigMeasure<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Atom<T> {
            counts: Vec<u32>,
            weight: T,
        }
        let atoms: Vec<Atom<T>> = Vec::deserialize(deserializer)?;
        let site_count = atoms.first().map(|a| a.counts.len()).unwrap_or(0);
        let mut measure = ConfigMeasure::new(site_count);
        for atom in atoms {
            measure
                .insert(PointConfig::new(atom.counts), atom.weight)
                .map_err(serde::de::Error::custom)?;
        }
        Ok(measure)
    }
}

/// A family of conditional measures indexed by configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable<T> {
    rows: BTreeMap<PointConfig, ConfigMeasure<T>>,
}

impl<T: Real> KernelTable<T> {
    pub fn new() -> Self {
        Self {
            rows: BTreeMap::new(),
        }
    }

    pub fn insert_row(&mut self, at: PointConfig, row: ConfigMeasure<T>) {
        self.rows.insert(at, row);
    }

    pub fn row(&self, at: &PointConfig) -> Option<&ConfigMeasure<T>> {
        self.rows.get(at)
    }

    /// Row mass at `(at, target)`; absent rows are zero rows.
    pub fn mass(&self, at: &PointConfig, target: &PointConfig) -> T {
        self.rows
            .get(at)
            .map(|r| r.mass(target))
            .unwrap_or_else(T::zero)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PointConfig, &ConfigMeasure<T>)> {
        self.rows.iter()
    }
}

impl<T: Real> Default for KernelTable<T> {
    fn default() -> Self {
        Self::new()
    }
}
