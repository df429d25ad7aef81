use std::collections::BTreeMap;

use crate::pp::{
    sub_multiplicity, thinning_kernel, thinning_normalization, ConfigMeasure, KernelTable,
    PointConfig, PpError, ThinningSpec,
};
use crate::scalar::{real, Real};

/// The condensation table together with the thinned law it disintegrates.
#[derive(Debug, Clone)]
pub struct PpCondensation<T> {
    pub table: KernelTable<T>,
    pub thinned: ConfigMeasure<T>,
    /// Observations whose thinned mass fell at or below the degenerate
    /// threshold; their rows were set to a point mass there.
    pub degenerate_rows: Vec<PointConfig>,
}

/// Exact Bayes disintegration of the joint law `T_μ(dη) P(dμ)`: the row at η
/// is `Q_η({μ}) = P({μ}) T_μ({η}) / P′({η})`, concentrated on `{μ ≥ η}`.
pub fn condensation_kernel<T: Real>(
    p: &ConfigMeasure<T>,
    spec: &ThinningSpec<T>,
) -> Result<PpCondensation<T>, PpError> {
    let s = p.site_count();
    let mut joint: BTreeMap<PointConfig, Vec<(PointConfig, T)>> = BTreeMap::new();
    for (mu, pw) in p.iter() {
        let row = thinning_kernel(spec, mu)?;
        for (eta, tw) in row.iter() {
            joint
                .entry(eta.clone())
                .or_default()
                .push((mu.clone(), pw * tw));
        }
    }
    let floor = real::<T>(1e-300);
    let mut table = KernelTable::new();
    let mut thinned = ConfigMeasure::new(s);
    let mut degenerate_rows = Vec::new();
    for (eta, contributions) in joint {
        let mass: T = contributions.iter().map(|&(_, w)| w).sum();
        thinned.insert(eta.clone(), mass)?;
        let mut row = ConfigMeasure::new(s);
        if mass > floor {
            for (mu, w) in contributions {
                row.insert(mu, w / mass)?;
            }
        } else {
            row.insert(eta.clone(), T::one())?;
            degenerate_rows.push(eta.clone());
        }
        table.insert_row(eta, row);
    }
    Ok(PpCondensation {
        table,
        thinned,
        degenerate_rows,
    })
}

/// The reduced Palm distribution at ν: the law of the rest of the population
/// given that ν has been observed inside it,
/// `P^!_ν({η}) ∝ P({ν + η}) · m(ν + η, ν)`, normalized.
pub fn reduced_palm<T: Real>(
    p: &ConfigMeasure<T>,
    nu: &PointConfig,
) -> Result<ConfigMeasure<T>, PpError> {
    if p.site_count() != nu.site_count() {
        return Err(PpError::SiteCountMismatch {
            left: p.site_count(),
            right: nu.site_count(),
        });
    }
    let mut out = ConfigMeasure::new(p.site_count());
    for (mu, w) in p.iter() {
        if let Some(eta) = mu.minus(nu) {
            let mult = sub_multiplicity::<T>(mu, nu)?;
            out.insert(eta, w * mult)?;
        }
    }
    if out.is_empty() {
        return Err(PpError::NoMass {
            config: nu.to_string(),
        });
    }
    out.normalized()
}

/// Reweighting applied to the Palm law: `Z_{ν+η}` for type 1, additionally
/// `t(|ν+η|, |ν|)` for type 2.
fn palm_factor<T: Real>(
    spec: &ThinningSpec<T>,
    combined: &PointConfig,
    kept: usize,
) -> Result<T, PpError> {
    let z = thinning_normalization(spec, combined)?;
    Ok(match spec.size_weight(combined.total(), kept) {
        Some(t) => z * t,
        None => z,
    })
}

/// The splitting kernel at ν through the reduced Palm route: the remainder
/// law `Υ_ν({η}) ∝ Z_{ν+η} P^!_ν({η})` (type-2 thinnings pick up the size
/// weight `t(|ν+η|, |ν|)`), normalized.
pub fn palm_splitting_kernel<T: Real>(
    p: &ConfigMeasure<T>,
    spec: &ThinningSpec<T>,
    nu: &PointConfig,
) -> Result<ConfigMeasure<T>, PpError> {
    let palm = reduced_palm(p, nu)?;
    let kept = nu.total();
    let mut out = ConfigMeasure::new(p.site_count());
    for (eta, w) in palm.iter() {
        let factor = palm_factor(spec, &nu.plus(eta), kept)?;
        out.insert(eta.clone(), w * factor)?;
    }
    if out.is_empty() {
        return Err(PpError::DegenerateThinning {
            config: nu.to_string(),
        });
    }
    out.normalized()
}

/// The condensation atom at ν via the Palm route,
/// `Q_ν({ν}) = Z_ν P^!_ν({∅}) / P^!_ν(Z_{ν+·})`; it must agree with the
/// Bayes row, and it is positive exactly when the Palm law can realize the
/// empty remainder.
pub fn condensation_atom<T: Real>(
    p: &ConfigMeasure<T>,
    spec: &ThinningSpec<T>,
    nu: &PointConfig,
) -> Result<T, PpError> {
    let palm = reduced_palm(p, nu)?;
    let kept = nu.total();
    let empty = PointConfig::empty(p.site_count());
    let mut denom = T::zero();
    for (eta, w) in palm.iter() {
        denom += w * palm_factor(spec, &nu.plus(eta), kept)?;
    }
    if !(denom > T::zero()) {
        return Err(PpError::DegenerateThinning {
            config: nu.to_string(),
        });
    }
    let z_nu = palm_factor(spec, nu, kept)?;
    Ok(z_nu * palm.mass(&empty) / denom)
}
