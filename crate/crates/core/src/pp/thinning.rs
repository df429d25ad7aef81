use std::fmt;
use std::sync::Arc;

use crate::pp::{enumerate_configs_up_to, ConfigMeasure, KernelTable, PointConfig, PpError};
use crate::scalar::{real, Real};
use crate::special::binomial_u128;

/// A thinning of a finite point process on a finite ground space.
///
/// The kernel row at μ weights each subconfiguration η ≤ μ by
/// `t · Π_i C(μ_i, η_i)` and normalizes; the reciprocal of the raw total is
/// the normalization `Z_μ`. The two supported weight shapes:
///
/// * type 1 — `t = t(η)` depends on the sampled subconfiguration only;
/// * type 2 — `t = t(|μ|, |η|)` depends on the two sizes only, so the
///   subconfiguration is uniform given its size.
#[derive(Clone)]
pub enum ThinningSpec<T> {
    Type1 {
        weight: Arc<dyn Fn(&PointConfig) -> T + Send + Sync>,
    },
    Type2 {
        weight: Arc<dyn Fn(usize, usize) -> T + Send + Sync>,
    },
}

impl<T: Real> ThinningSpec<T> {
    /// Independent thinning: every point survives with probability `q`,
    /// i.e. type 1 with `t(η) = (q/(1−q))^{|η|}` and `Z_μ = (1−q)^{|μ|}`.
    pub fn independent(q: T) -> Result<Self, PpError> {
        if !(q > T::zero() && q < T::one()) {
            return Err(PpError::InvalidParameter(format!(
                "survival probability must lie in (0,1), got {q}"
            )));
        }
        let odds = q / (T::one() - q);
        Ok(Self::Type1 {
            weight: Arc::new(move |eta| odds.powi(eta.total() as i32)),
        })
    }

    /// Site-dependent survival probabilities, type 1 with
    /// `t(η) = Π_i (q_i/(1−q_i))^{η_i}`.
    pub fn inhomogeneous(qs: Vec<T>) -> Result<Self, PpError> {
        if qs.iter().any(|&q| !(q > T::zero() && q < T::one())) {
            return Err(PpError::InvalidParameter(
                "site survival probabilities must lie in (0,1)".into(),
            ));
        }
        let odds: Vec<T> = qs.iter().map(|&q| q / (T::one() - q)).collect();
        Ok(Self::Type1 {
            weight: Arc::new(move |eta| {
                eta.counts()
                    .iter()
                    .zip(&odds)
                    .map(|(&c, &o)| o.powi(c as i32))
                    .fold(T::one(), |acc, f| acc * f)
            }),
        })
    }

    /// The uniform type-2 thinning `t(n, j) = 1 / C(n, j)`: the kept size is
    /// uniform on `{0, …, n}` and `Z_μ = 1/(|μ|+1)`.
    pub fn type2_binom_inverse() -> Self {
        Self::Type2 {
            weight: Arc::new(|n, j| real::<T>(1.0) / real(binomial_u128(n as u64, j as u64) as f64)),
        }
    }

    pub fn type1(weight: impl Fn(&PointConfig) -> T + Send + Sync + 'static) -> Self {
        Self::Type1 {
            weight: Arc::new(weight),
        }
    }

    pub fn type2(weight: impl Fn(usize, usize) -> T + Send + Sync + 'static) -> Self {
        Self::Type2 {
            weight: Arc::new(weight),
        }
    }

    /// The raw weight `t` for sampling η out of μ.
    pub fn raw_weight(&self, mu: &PointConfig, eta: &PointConfig) -> T {
        match self {
            Self::Type1 { weight } => weight(eta),
            Self::Type2 { weight } => weight(mu.total(), eta.total()),
        }
    }

    /// The size weight `t(n, j)` of a type-2 thinning.
    pub fn size_weight(&self, n: usize, j: usize) -> Option<T> {
        match self {
            Self::Type1 { .. } => None,
            Self::Type2 { weight } => Some(weight(n, j)),
        }
    }

    pub fn is_type2(&self) -> bool {
        matches!(self, Self::Type2 { .. })
    }
}

impl<T> fmt::Debug for ThinningSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Type1 { .. } => f.write_str("ThinningSpec::Type1"),
            Self::Type2 { .. } => f.write_str("ThinningSpec::Type2"),
        }
    }
}

/// Per-site selection multiplicity `Π_i C(μ_i, η_i)`, the number of ways to
/// realize η inside μ divided by the orderings of η itself.
fn config_binomial<T: Real>(mu: &PointConfig, eta: &PointConfig) -> T {
    let mut acc: u128 = 1;
    for site in 0..mu.site_count() {
        acc *= binomial_u128(mu.count(site) as u64, eta.count(site) as u64);
    }
    real(acc as f64)
}

/// The thinning row at μ: a probability measure on `{η ≤ μ}`, normalized
/// exactly by construction.
pub fn thinning_kernel<T: Real>(
    spec: &ThinningSpec<T>,
    mu: &PointConfig,
) -> Result<ConfigMeasure<T>, PpError> {
    let (row, _) = weighted_row(spec, mu)?;
    Ok(row)
}

/// The normalization `Z_μ`, the reciprocal of the raw row total.
pub fn thinning_normalization<T: Real>(
    spec: &ThinningSpec<T>,
    mu: &PointConfig,
) -> Result<T, PpError> {
    let (_, z) = weighted_row(spec, mu)?;
    Ok(z)
}

/// Exact enumeration cap: the per-site selection counts stay inside the
/// exact binomial range with room to spare.
const THINNING_POINT_CAP: usize = 60;

fn weighted_row<T: Real>(
    spec: &ThinningSpec<T>,
    mu: &PointConfig,
) -> Result<(ConfigMeasure<T>, T), PpError> {
    if mu.total() > THINNING_POINT_CAP {
        return Err(PpError::ConfigTooLarge {
            size: mu.total(),
            cap: THINNING_POINT_CAP,
        });
    }
    let mut weights = Vec::new();
    let mut total = T::zero();
    for eta in mu.subconfigs() {
        let w = spec.raw_weight(mu, &eta) * config_binomial(mu, &eta);
        if !(w >= T::zero()) || !w.is_finite() {
            return Err(PpError::BadWeight {
                config: eta.to_string(),
            });
        }
        if w > T::zero() {
            total += w;
            weights.push((eta, w));
        }
    }
    if !(total > T::zero()) {
        return Err(PpError::DegenerateThinning {
            config: mu.to_string(),
        });
    }
    let mut row = ConfigMeasure::new(mu.site_count());
    for (eta, w) in weights {
        row.insert(eta, w / total)?;
    }
    Ok((row, T::one() / total))
}

/// Thinning rows for every configuration with at most `n_max` points.
pub fn thinning_table<T: Real>(
    spec: &ThinningSpec<T>,
    site_count: usize,
    n_max: usize,
) -> Result<KernelTable<T>, PpError> {
    let mut table = KernelTable::new();
    for mu in enumerate_configs_up_to(site_count, n_max)? {
        let row = thinning_kernel(spec, &mu)?;
        table.insert_row(mu, row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_row_on_double_point() {
        // mu = 2 delta_a, q = 1/2: (1/4, 1/2, 1/4) on (empty, one, both).
        // Matches the per-site binomial closed form, and Z = (1-q)^2.
        let spec = ThinningSpec::independent(0.5f64).unwrap();
        let mu = PointConfig::new(vec![2]);
        let row = thinning_kernel(&spec, &mu).unwrap();
        assert!((row.mass(&PointConfig::new(vec![0])) - 0.25).abs() < 1e-15);
        assert!((row.mass(&PointConfig::new(vec![1])) - 0.5).abs() < 1e-15);
        assert!((row.mass(&PointConfig::new(vec![2])) - 0.25).abs() < 1e-15);
        let z = thinning_normalization(&spec, &mu).unwrap();
        assert!((z - 0.25).abs() < 1e-15);
    }

    #[test]
    fn independent_rows_match_per_site_binomials() {
        let q = 0.3f64;
        let spec = ThinningSpec::independent(q).unwrap();
        let mu = PointConfig::new(vec![2, 3]);
        let row = thinning_kernel(&spec, &mu).unwrap();
        for eta in mu.subconfigs() {
            let mut expected = 1.0;
            for site in 0..2 {
                let m = mu.count(site) as u64;
                let e = eta.count(site) as u64;
                expected *= binomial_u128(m, e) as f64
                    * q.powi(e as i32)
                    * (1.0 - q).powi((m - e) as i32);
            }
            assert!((row.mass(&eta) - expected).abs() < 1e-14, "eta {eta}");
        }
    }

    #[test]
    fn keep_all_weight_is_point_mass() {
        // t supported on eta = mu only.
        let mu = PointConfig::new(vec![1, 2]);
        let target = mu.clone();
        let spec = ThinningSpec::type1(move |eta: &PointConfig| {
            if *eta == target {
                1.0
            } else {
                0.0
            }
        });
        let row = thinning_kernel(&spec, &mu).unwrap();
        assert_eq!(row.mass(&mu), 1.0);
        assert_eq!(row.support_len(), 1);
    }

    #[test]
    fn binom_inverse_normalization() {
        let spec = ThinningSpec::<f64>::type2_binom_inverse();
        for mu in [PointConfig::new(vec![3]), PointConfig::new(vec![2, 2])] {
            let z = thinning_normalization(&spec, &mu).unwrap();
            assert!(
                (z - 1.0 / (mu.total() as f64 + 1.0)).abs() < 1e-14,
                "mu {mu}"
            );
            // Kept size is uniform.
            let row = thinning_kernel(&spec, &mu).unwrap();
            for size in 0..=mu.total() {
                let mass: f64 = row
                    .iter()
                    .filter(|(eta, _)| eta.total() == size)
                    .map(|(_, w)| w)
                    .sum();
                assert!((mass - 1.0 / (mu.total() as f64 + 1.0)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn all_zero_weight_rejected() {
        let spec = ThinningSpec::type1(|_: &PointConfig| 0.0f64);
        let mu = PointConfig::new(vec![1]);
        assert!(matches!(
            thinning_kernel(&spec, &mu),
            Err(PpError::DegenerateThinning { .. })
        ));
    }

    #[test]
    fn rows_sum_to_one() {
        let spec = ThinningSpec::inhomogeneous(vec![0.2f64, 0.7]).unwrap();
        for mu in enumerate_configs_up_to(2, 4).unwrap() {
            let row = thinning_kernel(&spec, &mu).unwrap();
            assert!((row.total() - 1.0).abs() < 1e-12, "mu {mu}");
            assert!(row.iter().all(|(eta, _)| eta.le(&mu)));
        }
    }
}
