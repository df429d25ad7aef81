use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::pp::{enumerate_configs_up_to, ConfigMeasure, GroundSpace, PointConfig, PpError};
use crate::scalar::{from_usize, real, Real};

/// Product-Poisson counts: `P(μ) = Π_i e^(−λ_i) λ_i^(μ_i) / μ_i!`, truncated
/// to configurations with at most `n_cap` points. The omitted tail is not
/// folded back in; normalize explicitly when a probability is needed.
pub fn poisson_counts_measure<T: Real>(
    space: &GroundSpace<T>,
    n_cap: usize,
) -> Result<ConfigMeasure<T>, PpError> {
    let s = space.site_count();
    // Per-site pmf tables by recurrence.
    let mut site_pmf: Vec<Vec<T>> = Vec::with_capacity(s);
    for i in 0..s {
        let lambda = space.weight(i);
        let mut pmf = Vec::with_capacity(n_cap + 1);
        pmf.push((-lambda).exp());
        for n in 0..n_cap {
            let next = pmf[n] * lambda / from_usize::<T>(n + 1);
            pmf.push(next);
        }
        site_pmf.push(pmf);
    }
    let mut out = ConfigMeasure::new(s);
    for mu in enumerate_configs_up_to(s, n_cap)? {
        let mut w = T::one();
        for site in 0..s {
            w *= site_pmf[site][mu.count(site) as usize];
        }
        out.insert(mu, w)?;
    }
    Ok(out)
}

/// Mixed-sample counts: `P(μ) ∝ p_{|μ|} Π_i (λ_i/λ(X))^{μ_i} / μ_i!`, the
/// law drawing a size from the count weights and then placing i.i.d. points.
/// The weights must obey the hole rule: once one vanishes, all later ones do.
pub fn mixed_sample_measure<T: Real>(
    space: &GroundSpace<T>,
    count_weights: &[T],
) -> Result<ConfigMeasure<T>, PpError> {
    if count_weights.is_empty() {
        return Err(PpError::InvalidParameter("empty count weights".into()));
    }
    let mut dead = None;
    for (index, &p) in count_weights.iter().enumerate() {
        if !(p >= T::zero()) || !p.is_finite() {
            return Err(PpError::InvalidParameter(format!(
                "count weight {index} must be non-negative and finite"
            )));
        }
        if p == T::zero() {
            dead.get_or_insert(index);
        } else if dead.is_some() {
            return Err(PpError::CountWeightHole { index });
        }
    }
    let s = space.site_count();
    let total = space.total_mass();
    let n_cap = count_weights.len() - 1;
    let mut out = ConfigMeasure::new(s);
    for mu in enumerate_configs_up_to(s, n_cap)? {
        let mut w = count_weights[mu.total()];
        if w == T::zero() {
            continue;
        }
        for site in 0..s {
            let lam_hat = space.weight(site) / total;
            let c = mu.count(site) as usize;
            w *= lam_hat.powi(c as i32);
            for j in 1..=c {
                w /= from_usize::<T>(j);
            }
        }
        out.insert(mu, w)?;
    }
    out.normalized()
}

/// A point mass at one configuration.
pub fn point_mass_measure<T: Real>(config: PointConfig) -> ConfigMeasure<T> {
    let mut out = ConfigMeasure::new(config.site_count());
    out.insert(config, T::one()).expect("point mass weight is valid");
    out
}

/// A seeded random law with full support on `{|μ| ≤ n_cap}`; atom weights are
/// uniform on [0.1, 1), bounded away from zero so the positivity hypotheses
/// of the exact identities hold.
pub fn random_measure<T: Real>(
    site_count: usize,
    n_cap: usize,
    seed: u64,
) -> Result<ConfigMeasure<T>, PpError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ConfigMeasure::new(site_count);
    for mu in enumerate_configs_up_to(site_count, n_cap)? {
        let w: f64 = rng.random_range(0.1..1.0);
        out.insert(mu, real(w))?;
    }
    out.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_counts_single_site_matches_pmf() {
        let space = GroundSpace::new(vec![2.0f64]).unwrap();
        let p = poisson_counts_measure(&space, 20).unwrap();
        let mut expected = (-2.0f64).exp();
        for n in 0..=20usize {
            let config = PointConfig::new(vec![n as u32]);
            assert!((p.mass(&config) - expected).abs() < 1e-15, "n = {n}");
            expected *= 2.0 / (n as f64 + 1.0);
        }
    }

    #[test]
    fn poisson_counts_factorize_over_sites() {
        let space = GroundSpace::new(vec![0.5f64, 1.5]).unwrap();
        let p = poisson_counts_measure(&space, 6).unwrap();
        let m = |a: u32, b: u32| p.mass(&PointConfig::new(vec![a, b]));
        // P(1,2) * P(0,0) = P(1,0) * P(0,2) by independence of sites.
        let lhs = m(1, 2) * m(0, 0);
        let rhs = m(1, 0) * m(0, 2);
        assert!((lhs - rhs).abs() < 1e-18);
    }

    #[test]
    fn mixed_sample_hole_rule() {
        let space = GroundSpace::new(vec![1.0f64, 1.0]).unwrap();
        assert!(matches!(
            mixed_sample_measure(&space, &[1.0, 0.0, 1.0]),
            Err(PpError::CountWeightHole { index: 2 })
        ));
        let p = mixed_sample_measure(&space, &[1.0, 1.0, 0.0]).unwrap();
        assert!((p.total() - 1.0).abs() < 1e-12);
        assert_eq!(p.max_total(), 1);
    }

    #[test]
    fn mixed_sample_size_marginal() {
        // p = (1, 2) with two equal sites: P(|mu| = 1) = 2/3.
        let space = GroundSpace::new(vec![1.0f64, 1.0]).unwrap();
        let p = mixed_sample_measure(&space, &[1.0, 2.0]).unwrap();
        assert!((p.layer_mass(1) - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn random_measure_is_seeded_and_full() {
        let a = random_measure::<f64>(2, 3, 9).unwrap();
        let b = random_measure::<f64>(2, 3, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.support_len(), 10);
        assert!((a.total() - 1.0).abs() < 1e-12);
    }
}
