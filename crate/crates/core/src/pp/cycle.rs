use crate::pp::{
    condensation_kernel, enumerate_configs_up_to, thinning_table, ConfigMeasure, KernelTable,
    PointConfig, PpError, ThinningSpec,
};
use crate::scalar::Real;

/// Worst alternating-cycle violation over configuration quadruples.
#[derive(Debug, Clone)]
pub struct PpCycleReport<T> {
    pub max_violation: T,
    /// `(κ, μ, λ, ν)` achieving the maximum.
    pub worst: (PointConfig, PointConfig, PointConfig, PointConfig),
}

/// Atomwise alternating-cycle condition over every quadruple drawn from
/// `domain`:
///
/// `T_ν({κ}) Q_λ({ν}) T_μ({λ}) Q_κ({μ}) = T_μ({κ}) Q_λ({μ}) T_ν({λ}) Q_κ({ν})`.
///
/// Rows absent from `q` carry no thinned mass and count as zero rows.
pub fn kernel_cycle_violation<T: Real>(
    t: &KernelTable<T>,
    q: &KernelTable<T>,
    domain: &[PointConfig],
) -> Result<PpCycleReport<T>, PpError> {
    let mut max = T::zero();
    let empty = PointConfig::empty(domain.first().map(|c| c.site_count()).unwrap_or(1));
    let mut worst = (empty.clone(), empty.clone(), empty.clone(), empty);
    for kappa in domain {
        let q_kappa = q.row(kappa);
        for mu in domain {
            let q_k_mu = q_kappa.map(|r| r.mass(mu)).unwrap_or_else(T::zero);
            let t_mu = t.row(mu).ok_or_else(|| PpError::MissingRow {
                config: mu.to_string(),
            })?;
            let t_mu_kappa = t_mu.mass(kappa);
            for lambda in domain {
                let t_mu_lambda = t_mu.mass(lambda);
                let q_lambda = q.row(lambda);
                let q_l_mu = q_lambda.map(|r| r.mass(mu)).unwrap_or_else(T::zero);
                for nu in domain {
                    let t_nu = t.row(nu).ok_or_else(|| PpError::MissingRow {
                        config: nu.to_string(),
                    })?;
                    let q_l_nu = q_lambda.map(|r| r.mass(nu)).unwrap_or_else(T::zero);
                    let q_k_nu = q_kappa.map(|r| r.mass(nu)).unwrap_or_else(T::zero);
                    let lhs = t_nu.mass(kappa) * q_l_nu * t_mu_lambda * q_k_mu;
                    let rhs = t_mu_kappa * q_l_mu * t_nu.mass(lambda) * q_k_nu;
                    let v = (lhs - rhs).abs();
                    if v > max {
                        max = v;
                        worst = (kappa.clone(), mu.clone(), lambda.clone(), nu.clone());
                    }
                }
            }
        }
    }
    Ok(PpCycleReport {
        max_violation: max,
        worst,
    })
}

/// Builds the condensation of `(P, thinning)` and checks the alternating
/// cycle condition exhaustively over all configurations up to the support's
/// largest total count.
pub fn verify_cycle_kernels<T: Real>(
    p: &ConfigMeasure<T>,
    spec: &ThinningSpec<T>,
) -> Result<PpCycleReport<T>, PpError> {
    let top = p.max_total();
    let domain = enumerate_configs_up_to(p.site_count(), top)?;
    let t = thinning_table(spec, p.site_count(), top)?;
    let c = condensation_kernel(p, spec)?;
    kernel_cycle_violation(&t, &c.table, &domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pp::random_measure;

    #[test]
    fn balanced_kernels_satisfy_cycles() {
        let p = random_measure::<f64>(2, 3, 33).unwrap();
        for spec in [
            ThinningSpec::independent(0.4).unwrap(),
            ThinningSpec::<f64>::type2_binom_inverse(),
        ] {
            let report = verify_cycle_kernels(&p, &spec).unwrap();
            assert!(
                report.max_violation < 1e-10,
                "violation {:?}",
                report.max_violation
            );
        }
    }

    #[test]
    fn equal_configs_cancel_exactly() {
        let p = random_measure::<f64>(2, 3, 34).unwrap();
        let spec = ThinningSpec::independent(0.5).unwrap();
        let top = p.max_total();
        let t = thinning_table(&spec, 2, top).unwrap();
        let c = condensation_kernel(&p, &spec).unwrap();
        for mu in enumerate_configs_up_to(2, top).unwrap() {
            let tm = t.row(&mu).unwrap().mass(&mu);
            let qm = c.table.row(&mu).map(|r| r.mass(&mu)).unwrap_or(0.0);
            let lhs = tm * qm * tm * qm;
            let rhs = tm * qm * tm * qm;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn perturbed_row_is_detected() {
        // A concentrated law keeps the kernel atoms large, so a 1% dent in
        // one condensation row must surface well above the pass tolerance.
        use crate::pp::{poisson_counts_measure, GroundSpace};
        let space = GroundSpace::new(vec![2.0f64]).unwrap();
        let p = poisson_counts_measure(&space, 6).unwrap();
        let spec = ThinningSpec::independent(0.5).unwrap();
        let top = p.max_total();
        let domain = enumerate_configs_up_to(1, top).unwrap();
        let t = thinning_table(&spec, 1, top).unwrap();
        let mut c = condensation_kernel(&p, &spec).unwrap();

        // Scale the largest off-diagonal atom of the empty-observation row
        // by 1% and renormalize it.
        let eta = PointConfig::empty(1);
        let row = c.table.row(&eta).unwrap().clone();
        let target = row
            .iter()
            .filter(|(mu, _)| **mu != eta)
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap()
            .0
            .clone();
        let mut bumped = ConfigMeasure::new(1);
        for (mu, w) in row.iter() {
            let w = if *mu == target { w * 1.01 } else { w };
            bumped.insert(mu.clone(), w).unwrap();
        }
        c.table.insert_row(eta, bumped.normalized().unwrap());

        let report = kernel_cycle_violation(&t, &c.table, &domain).unwrap();
        assert!(
            report.max_violation > 1e-4,
            "violation {:?}",
            report.max_violation
        );
    }
}
