use std::collections::BTreeMap;

use crate::pp::{
    reduced_palm, thinning_kernel, thinning_normalization, ConfigMeasure, PointConfig, PpError,
    ThinningSpec,
};
use crate::scalar::Real;

/// Cache of thinning normalizations, keyed by configuration.
struct ZCache<'a, T> {
    spec: &'a ThinningSpec<T>,
    values: BTreeMap<PointConfig, T>,
}

impl<'a, T: Real> ZCache<'a, T> {
    fn new(spec: &'a ThinningSpec<T>) -> Self {
        Self {
            spec,
            values: BTreeMap::new(),
        }
    }

    fn get(&mut self, config: &PointConfig) -> Result<T, PpError> {
        if let Some(&z) = self.values.get(config) {
            return Ok(z);
        }
        let z = thinning_normalization(self.spec, config)?;
        self.values.insert(config.clone(), z);
        Ok(z)
    }
}

/// The hypotheses of the integration-by-parts identity: the law is layered
/// without holes, and on its support the thinning keeps everything, and
/// removes exactly one point, with positive probability.
fn check_hypotheses<T: Real>(
    p: &ConfigMeasure<T>,
    spec: &ThinningSpec<T>,
) -> Result<(), PpError> {
    let top = p.max_total();
    let mut dead_layer = None;
    for n in 0..=top {
        if p.layer_mass(n) > T::zero() {
            if let Some(layer) = dead_layer {
                return Err(PpError::HoleInLayers { layer, offender: n });
            }
        } else {
            dead_layer.get_or_insert(n);
        }
    }
    for (mu, _) in p.iter() {
        if mu.total() == 0 {
            continue;
        }
        let row = thinning_kernel(spec, mu)?;
        if !(row.mass(mu) > T::zero()) {
            return Err(PpError::Hypothesis {
                config: mu.to_string(),
                what: "keeping the whole configuration has zero probability",
            });
        }
        let mut removal = T::zero();
        for site in 0..mu.site_count() {
            if let Some(down) = mu.with_removed(site) {
                removal += row.mass(&down) * T::from_u32(mu.count(site)).unwrap();
            }
        }
        if !(removal > T::zero()) {
            return Err(PpError::Hypothesis {
                config: mu.to_string(),
                what: "removing a single point has zero probability",
            });
        }
    }
    Ok(())
}

/// The death factor multiplying `g(x, μ) μ(dx)` on the removal side:
/// `Z_μ / Z_{μ−δ_x}`, with the size-weight ratio `t(|μ|, |μ|−1) / t(|μ|−1, |μ|−1)`
/// for type-2 thinnings.
fn death_factor<T: Real>(
    z: &mut ZCache<'_, T>,
    spec: &ThinningSpec<T>,
    mu: &PointConfig,
    down: &PointConfig,
) -> Result<T, PpError> {
    let base = z.get(mu)? / z.get(down)?;
    Ok(match (
        spec.size_weight(mu.total(), mu.total() - 1),
        spec.size_weight(mu.total() - 1, mu.total() - 1),
    ) {
        (Some(t_down), Some(t_keep)) => base * t_down / t_keep,
        _ => base,
    })
}

/// The Papangelou kernel mass for adding one point at `site`, computed from
/// the reduced Palm law:
/// `π(μ, {x}) = Z̃_{μ+δ_x} / (Z̃_μ P^!_μ({∅})) · P^!_μ({δ_x})`
/// with `Z̃` carrying the type-2 size weights `t(|μ|+1, |μ|)` and `t(|μ|, |μ|)`.
fn papangelou_site_masses<T: Real>(
    p: &ConfigMeasure<T>,
    spec: &ThinningSpec<T>,
    z: &mut ZCache<'_, T>,
    mu: &PointConfig,
) -> Result<Vec<T>, PpError> {
    let s = p.site_count();
    let palm = reduced_palm(p, mu)?;
    let empty_mass = palm.mass(&PointConfig::empty(s));
    if !(empty_mass > T::zero()) {
        return Err(PpError::Hypothesis {
            config: mu.to_string(),
            what: "reduced Palm law cannot realize the empty remainder",
        });
    }
    let m = mu.total();
    let size_ratio = match (spec.size_weight(m + 1, m), spec.size_weight(m, m)) {
        (Some(up), Some(keep)) => up / keep,
        _ => T::one(),
    };
    let z_mu = z.get(mu)?;
    let mut out = Vec::with_capacity(s);
    for site in 0..s {
        let up = mu.with_added(site);
        let one_point = PointConfig::empty(s).with_added(site);
        let rho = palm.mass(&one_point);
        let value = if rho > T::zero() {
            z.get(&up)? * size_ratio / (z_mu * empty_mass) * rho
        } else {
            T::zero()
        };
        out.push(value);
    }
    Ok(out)
}

/// The Papangelou kernel of `(P, thinning)` at μ: the per-site intensity for
/// adding one point, via the reduced Palm route.
pub fn papangelou_kernel_exact<T: Real>(
    p: &ConfigMeasure<T>,
    spec: &ThinningSpec<T>,
    mu: &PointConfig,
) -> Result<Vec<T>, PpError> {
    let mut z = ZCache::new(spec);
    papangelou_site_masses(p, spec, &mut z, mu)
}

/// Verifies the integration-by-parts identity
///
/// `Σ_μ P(μ) Σ_{x∈μ} g(x, μ) (Z_μ/Z_{μ−δ_x}) μ({x})
///   = Σ_μ P(μ) Σ_x g(x, μ+δ_x) π(μ, {x})`
///
/// over all indicator test functions of (site, total count) pairs, the left
/// side from the thinning normalizations, the right side from the Palm-route
/// Papangelou kernel. Returns the largest residual.
#[allow(clippy::needless_range_loop)]
pub fn verify_ibp_exact<T: Real>(
    p: &ConfigMeasure<T>,
    spec: &ThinningSpec<T>,
) -> Result<T, PpError> {
    check_hypotheses(p, spec)?;
    let s = p.site_count();
    let top = p.max_total();
    let mut z = ZCache::new(spec);

    // Accumulate both sides per (site, resulting total) cell; the indicator
    // family residual is the largest cellwise gap.
    let mut lhs = vec![vec![T::zero(); top + 2]; s];
    let mut rhs = vec![vec![T::zero(); top + 2]; s];

    for (mu, pw) in p.iter() {
        let m = mu.total();
        if m >= 1 {
            for site in 0..s {
                if let Some(down) = mu.with_removed(site) {
                    let factor = death_factor(&mut z, spec, mu, &down)?;
                    lhs[site][m] += pw * factor * T::from_u32(mu.count(site)).unwrap();
                }
            }
        }
        let pi = papangelou_site_masses(p, spec, &mut z, mu)?;
        for site in 0..s {
            rhs[site][m + 1] += pw * pi[site];
        }
    }

    let mut worst = T::zero();
    for site in 0..s {
        for total in 0..=top + 1 {
            worst = worst.max((lhs[site][total] - rhs[site][total]).abs());
        }
    }
    Ok(worst)
}
