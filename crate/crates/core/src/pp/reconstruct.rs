use crate::pp::{
    enumerate_configs, enumerate_configs_up_to, kernel_cycle_violation, ConfigMeasure,
    KernelTable, PointConfig, PpError,
};
use crate::scalar::Real;
use crate::tol;

/// Result of rebuilding a point process from a thinning/condensation pair.
#[derive(Debug, Clone)]
pub struct PpReconstruction<T> {
    /// The layer-wise thinned measure, anchored at `P′(∅) = 1`.
    pub p_prime: ConfigMeasure<T>,
    /// The underlying measure assembled through the condensation rows.
    pub p: ConfigMeasure<T>,
    /// Mass per layer of `p_prime`.
    pub layer_masses: Vec<T>,
    /// Layer at which the recursion ran out of mass, if it did.
    pub halt_layer: Option<usize>,
    /// Set when no halt occurred inside the window: the finiteness verdict
    /// then rests on the last layer ratio, not on exhaustion.
    pub window_limited: bool,
    /// Finiteness verdict for the assembled measure.
    pub finite: bool,
    /// Largest residual of `P(μ) T_μ({ν}) = P′(ν) Q_ν({μ})` over the window.
    pub identity_residual: T,
    /// Normalized `p`, when the verdict is finite.
    pub p_normalized: Option<ConfigMeasure<T>>,
}

/// Rebuilds the thinned layers by the recursion
///
/// `P′_{n+1}({μ}) = T_μ({μ}) / (T_μ(M_n) · Q_μ({μ})) · Σ_{ν ∈ M_n} Q_ν({μ}) P′_n({ν})`
///
/// then assembles the underlying measure as `P = P′ Q` and verifies the
/// disintegration identity on the window.
///
/// `t` must carry a row for every configuration up to `n_max`; `q` rows may
/// be partial (missing rows are zero rows). The alternating cycle condition
/// is checked first — without it the recursion would fabricate a measure
/// that balances nothing.
pub fn reconstruct_pp<T: Real>(
    t: &KernelTable<T>,
    q: &KernelTable<T>,
    site_count: usize,
    n_max: usize,
) -> Result<PpReconstruction<T>, PpError> {
    let domain = enumerate_configs_up_to(site_count, n_max)?;
    let cycle = kernel_cycle_violation(t, q, &domain)?;
    if cycle.max_violation > tol::cycle_tol() {
        let (kappa, mu, lambda, nu) = cycle.worst;
        return Err(PpError::CycleViolation {
            kappa: kappa.to_string(),
            mu: mu.to_string(),
            lambda: lambda.to_string(),
            nu: nu.to_string(),
            violation: cycle.max_violation.to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut p_prime = ConfigMeasure::new(site_count);
    let mut layer: Vec<(PointConfig, T)> = vec![(PointConfig::empty(site_count), T::one())];
    p_prime.insert(PointConfig::empty(site_count), T::one())?;
    let mut layer_masses = vec![T::one()];
    let mut halt_layer = None;

    for n in 0..n_max {
        let mut next: Vec<(PointConfig, T)> = Vec::new();
        for mu in enumerate_configs(site_count, n + 1)? {
            let mut incoming = T::zero();
            for (nu, w) in &layer {
                incoming += q.mass(nu, &mu) * *w;
            }
            if !(incoming > T::zero()) {
                continue;
            }
            let t_row = t.row(&mu).ok_or_else(|| PpError::MissingRow {
                config: mu.to_string(),
            })?;
            let t_keep = t_row.mass(&mu);
            let t_layer = t_row.layer_mass(n);
            if !(t_layer > T::zero()) {
                return Err(PpError::ZeroDenominator {
                    config: mu.to_string(),
                    what: "thinning mass onto the previous layer",
                });
            }
            let q_own = q.mass(&mu, &mu);
            if !(q_own > T::zero()) {
                return Err(PpError::ZeroDenominator {
                    config: mu.to_string(),
                    what: "condensation atom",
                });
            }
            let weight = t_keep * incoming / (t_layer * q_own);
            next.push((mu, weight));
        }
        if next.is_empty() {
            halt_layer = Some(n + 1);
            break;
        }
        let mass: T = next.iter().map(|&(_, w)| w).sum();
        layer_masses.push(mass);
        for (mu, w) in &next {
            p_prime.insert(mu.clone(), *w)?;
        }
        layer = next;
    }

    // P = P'Q.
    let mut p = ConfigMeasure::new(site_count);
    for (nu, w) in p_prime.iter() {
        if let Some(row) = q.row(nu) {
            for (mu, qw) in row.iter() {
                p.insert(mu.clone(), w * qw)?;
            }
        }
    }

    let mut identity_residual = T::zero();
    for (mu, pw) in p.iter() {
        let t_row = t.row(mu).ok_or_else(|| PpError::MissingRow {
            config: mu.to_string(),
        })?;
        for (nu, tw) in t_row.iter() {
            let lhs = pw * tw;
            let rhs = p_prime.mass(nu) * q.mass(nu, mu);
            identity_residual = identity_residual.max((lhs - rhs).abs());
        }
    }

    let window_limited = halt_layer.is_none();
    let finite = if !window_limited || layer_masses.len() < 2 {
        true
    } else {
        let last = layer_masses[layer_masses.len() - 1];
        let prev = layer_masses[layer_masses.len() - 2];
        let ratio = last / prev;
        if ratio < T::one() {
            let total: T = layer_masses.iter().copied().sum();
            total + last * ratio / (T::one() - ratio) < tol::mass_cap()
        } else {
            false
        }
    };
    let p_normalized = if finite { p.normalized().ok() } else { None };

    Ok(PpReconstruction {
        p_prime,
        p,
        layer_masses,
        halt_layer,
        window_limited,
        finite,
        identity_residual,
        p_normalized,
    })
}
