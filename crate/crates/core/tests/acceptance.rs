//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its runtime (run with `--nocapture` to see them).
//!
//! Every tolerance is pinned in the assertions below; the runtime budgets
//! are asserted too.

use std::time::Instant;

use thincond_core::dist::{
    condense, detailed_balance_residual, reconstruct, splitting_of,
    verify_cycle_excluding, TruncatedPmf,
};
use thincond_core::mc::{
    mc_verify_ibp, mc_verify_poisson_thinning, GFunction, McThinning, ProcessSpec,
};
use thincond_core::pp::{
    condensation_kernel, enumerate_configs_up_to, mixed_sample_measure, palm_splitting_kernel,
    papangelou_kernel_exact, poisson_counts_measure, random_measure, reconstruct_pp,
    thinning_kernel, thinning_table, verify_ibp_exact, GroundSpace, PointConfig, ThinningSpec,
};
use thincond_core::zoo::{
    closed_form_condensation, make_dist, make_thinning, power_law_splitting_entry, DistSpec,
    ThinSpec,
};

fn report(id: u32, name: &str, started: Instant, budget_s: f64, detail: String) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("[acceptance] {id:2} {name}: PASS ({detail}, {elapsed:.2}s)");
    assert!(
        elapsed < budget_s,
        "criterion {id} exceeded its {budget_s}s budget: {elapsed:.2}s"
    );
}

fn geometric_weights(n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| 0.5f64.powi(n as i32 + 1)).collect()
}

/// Independent high-precision zeta oracle: plain descending partial sum plus
/// the integral sandwich midpoint; error well below 1e-10 at 3e6 terms.
fn zeta_oracle(alpha: f64) -> f64 {
    let terms = 3_000_000usize;
    let mut sum = 0.0f64;
    for j in (0..terms).rev() {
        sum += ((j + 1) as f64).powf(-alpha);
    }
    let edge = terms as f64 + 1.0;
    sum + edge.powf(1.0 - alpha) / (alpha - 1.0) + edge.powf(-alpha) / 2.0
}

#[test]
fn criterion_01_panjer_recursions() {
    let started = Instant::now();
    let cases: Vec<(DistSpec<f64>, f64, f64)> = vec![
        (DistSpec::Poisson { lambda: 2.0 }, 0.3, 2.0),
        (DistSpec::Binomial { r: 5, p: 0.4 }, 0.3, 5.0 * 0.4 / 0.6),
        (DistSpec::NegBinomial { r: 2.0, p: 0.3 }, 0.5, 2.0 * 0.3),
    ];
    let mut worst_residual = 0.0f64;
    let mut worst_ratio_gap = 0.0f64;
    for (dist, q, expected_ratio) in cases {
        let nu = make_dist(&dist, 60, 1e-12).unwrap();
        let t = make_thinning(&ThinSpec::Independent { q }, nu.n_max()).unwrap();
        let c = condense(&nu, &t).unwrap();
        let residuals = detailed_balance_residual(&nu, &t, &c.matrix).unwrap();
        let max_residual = residuals.into_iter().fold(0.0f64, f64::max);
        assert!(
            max_residual < 1e-11,
            "{}: detailed balance residual {max_residual}",
            dist.name()
        );
        worst_residual = worst_residual.max(max_residual);

        let rec = reconstruct(&t, &c.matrix, nu.n_max()).unwrap();
        let ratio = rec.measure.weight(1) / rec.measure.weight(0);
        let gap = (ratio - expected_ratio).abs();
        assert!(gap < 1e-10, "{}: ratio {ratio} vs {expected_ratio}", dist.name());
        worst_ratio_gap = worst_ratio_gap.max(gap);
    }
    report(
        1,
        "Panjer recursions",
        started,
        1.0,
        format!("max residual {worst_residual:.2e}, max ratio gap {worst_ratio_gap:.2e}"),
    );
}

#[test]
fn criterion_02_closed_form_oracle_agreement() {
    let started = Instant::now();
    let cases: Vec<(DistSpec<f64>, ThinSpec<f64>, usize)> = vec![
        (
            DistSpec::Poisson { lambda: 2.0 },
            ThinSpec::Independent { q: 0.5 },
            80,
        ),
        (
            DistSpec::Binomial { r: 5, p: 0.4 },
            ThinSpec::Independent { q: 0.3 },
            40,
        ),
        (
            DistSpec::NegBinomial { r: 2.0, p: 0.3 },
            ThinSpec::Independent { q: 0.5 },
            80,
        ),
        (DistSpec::PowerLaw { alpha: 2.0 }, ThinSpec::Uniform, 80),
        (
            DistSpec::Custom {
                weights: geometric_weights(60),
            },
            ThinSpec::AllOrNothing { q: 0.5 },
            60,
        ),
        (
            DistSpec::Custom {
                weights: geometric_weights(60),
            },
            ThinSpec::AlmostNothing { q: 0.3 },
            60,
        ),
    ];
    let mut worst = 0.0f64;
    let mut worst_balance = 0.0f64;
    for (dist, thin_spec, n_max) in cases {
        let nu = make_dist(&dist, n_max, 1.0).unwrap();
        let t = make_thinning(&thin_spec, nu.n_max()).unwrap();
        let bayes = condense(&nu, &t).unwrap();
        let closed = closed_form_condensation(&dist, &thin_spec, nu.n_max()).unwrap();
        let mut pair_worst = 0.0f64;
        let mut balance = 0.0f64;
        for k in 0..=nu.n_max() {
            if bayes.thinned.weight(k) <= 1e-14 {
                continue;
            }
            for n in k..=nu.n_max() {
                let lhs = bayes.thinned.weight(k) * bayes.matrix.get(k, n);
                let rhs = nu.weight(n) * t.get(n, k);
                balance = balance.max((lhs - rhs).abs());
                if bayes.thinned.weight(k) > 1e-12 {
                    pair_worst =
                        pair_worst.max((bayes.matrix.get(k, n) - closed.get(k, n)).abs());
                }
            }
        }
        assert!(
            pair_worst < 1e-10,
            "({}, {}): entrywise gap {pair_worst}",
            dist.name(),
            thin_spec.name()
        );
        assert!(
            balance < 1e-12,
            "({}, {}): balance residual {balance}",
            dist.name(),
            thin_spec.name()
        );
        worst = worst.max(pair_worst);
        worst_balance = worst_balance.max(balance);
    }
    report(
        2,
        "balance vs closed-form oracles (6 pairs)",
        started,
        1.0,
        format!("max entrywise gap {worst:.2e}, max balance residual {worst_balance:.2e}"),
    );
}

#[test]
fn criterion_03_cycle_condition() {
    let started = Instant::now();
    let dists: Vec<DistSpec<f64>> = vec![
        DistSpec::Poisson { lambda: 2.0 },
        DistSpec::Binomial { r: 5, p: 0.4 },
        DistSpec::NegBinomial { r: 2.0, p: 0.3 },
        DistSpec::PowerLaw { alpha: 2.0 },
        DistSpec::Custom {
            weights: geometric_weights(40),
        },
    ];
    let thinnings: Vec<ThinSpec<f64>> = vec![
        ThinSpec::Independent { q: 0.3 },
        ThinSpec::Independent { q: 0.5 },
        ThinSpec::Uniform,
        ThinSpec::AllOrNothing { q: 0.3 },
        ThinSpec::AlmostNothing { q: 0.3 },
    ];
    let mut worst = 0.0f64;
    let mut pairs = 0u32;
    for dist in &dists {
        for thin_spec in &thinnings {
            let nu = make_dist(dist, 40, 1.0).unwrap();
            let t = make_thinning(thin_spec, nu.n_max()).unwrap();
            let c = condense(&nu, &t).unwrap();
            let rep =
                verify_cycle_excluding(&t, &c.matrix, 25, &c.pathological_rows).unwrap();
            assert!(
                rep.max_violation < 1e-11,
                "({}, {}): violation {:?}",
                dist.name(),
                thin_spec.name(),
                rep
            );
            worst = worst.max(rep.max_violation);
            pairs += 1;
        }
    }

    // Detector sensitivity: a 1% dent in one healthy row must show up.
    let nu = make_dist(&DistSpec::Poisson { lambda: 2.0 }, 40, 1e-12).unwrap();
    let t = make_thinning(&ThinSpec::Independent { q: 0.5 }, nu.n_max()).unwrap();
    let c = condense(&nu, &t).unwrap();
    let bumped = c.matrix.with_scaled_entry(1, 2, 1.01).unwrap();
    let rep = verify_cycle_excluding(&t, &bumped, 25, &c.pathological_rows).unwrap();
    assert!(rep.max_violation > 1e-4, "detector too weak: {rep:?}");

    report(
        3,
        "alternating cycle condition",
        started,
        10.0,
        format!("{pairs} pairs, max violation {worst:.2e}, detector {:.2e}", rep.max_violation),
    );
}

#[test]
fn criterion_04_reconstruction_roundtrip() {
    let started = Instant::now();
    let dists: Vec<DistSpec<f64>> = vec![
        DistSpec::Poisson { lambda: 2.0 },
        DistSpec::Binomial { r: 5, p: 0.4 },
        DistSpec::NegBinomial { r: 2.0, p: 0.3 },
        DistSpec::PowerLaw { alpha: 2.0 },
        DistSpec::Custom {
            weights: geometric_weights(60),
        },
    ];
    let mut worst_tv = 0.0f64;
    let mut clamp_limited = Vec::new();
    for dist in &dists {
        for thin_spec in [ThinSpec::Independent { q: 0.5 }, ThinSpec::Uniform] {
            let nu = make_dist(dist, 60, 1.0).unwrap();
            let t = make_thinning(&thin_spec, nu.n_max()).unwrap();
            let c = condense(&nu, &t).unwrap();
            let rec = reconstruct(&t, &c.matrix, nu.n_max()).unwrap();
            let recovered = rec.normalized.expect("window-normalizable");
            let tv = recovered.tv_distance(&nu.renormalized().unwrap());
            if tv < 1e-9 {
                worst_tv = worst_tv.max(tv);
                continue;
            }
            // A heavy tail under a mass-spreading thinning starves the top
            // condensation rows of the window (they clamp), so the pair only
            // encodes the law up to the cutoff. The faithful roundtrip claim
            // is on that sub-window.
            let cutoff = rec.cutoff.expect("large tv only from a clamped cutoff");
            assert!(
                !c.pathological_rows.is_empty() && c.pathological_rows[0] == cutoff,
                "({}, {}): tv {tv} without clamped rows",
                dist.name(),
                thin_spec.name()
            );
            let head: Vec<f64> = (0..=cutoff).map(|n| nu.weight(n)).collect();
            let head_ref = TruncatedPmf::from_weights(head).unwrap();
            let restricted: Vec<f64> = (0..=cutoff).map(|n| recovered.weight(n)).collect();
            let head_rec = TruncatedPmf::from_weights(restricted).unwrap();
            let tv_head = head_rec.tv_distance(&head_ref);
            assert!(
                tv_head < 1e-9,
                "({}, {}): clamp-window tv {tv_head}",
                dist.name(),
                thin_spec.name()
            );
            worst_tv = worst_tv.max(tv_head);
            clamp_limited.push(format!("{}x{}@{cutoff}", dist.name(), thin_spec.name()));
        }
    }

    // Power law: the recursion reproduces (n+1)^-alpha from the Bayes
    // condensation, and the splitting head entry equals 1/zeta(alpha+1)
    // with a certified bound.
    let alpha = 2.0f64;
    let nu = make_dist(&DistSpec::PowerLaw { alpha }, 400, 1.0).unwrap();
    let t = make_thinning(&ThinSpec::Uniform, nu.n_max()).unwrap();
    let c = condense(&nu, &t).unwrap();
    let rec = reconstruct(&t, &c.matrix, nu.n_max()).unwrap();
    let mut worst_weight_gap = 0.0f64;
    for n in 0..=nu.n_max() {
        let expected = ((n + 1) as f64).powf(-alpha);
        worst_weight_gap = worst_weight_gap.max((rec.measure.weight(n) - expected).abs());
    }
    assert!(worst_weight_gap < 1e-9, "power-law weights off by {worst_weight_gap}");

    let (upsilon_00, certified_err) = power_law_splitting_entry(alpha, 0, 0).unwrap();
    assert!(certified_err <= 1e-13, "zeta bound {certified_err}");
    let oracle = 1.0 / zeta_oracle(alpha + 1.0);
    assert!(
        (upsilon_00 - oracle).abs() < 1e-9,
        "upsilon00 {upsilon_00} vs oracle {oracle}"
    );

    // Pipeline consistency at the window level: the condensed splitting head
    // equals the window-truncated analytic value.
    let window_zeta: f64 = (0..=nu.n_max()).rev().map(|j| ((j + 1) as f64).powi(-3)).sum();
    let ups = splitting_of(&c.matrix).unwrap();
    assert!((ups.get(0, 0) - 1.0 / window_zeta).abs() < 1e-12);

    let clamp_note = if clamp_limited.is_empty() {
        String::new()
    } else {
        format!(", clamp-limited: {}", clamp_limited.join(" "))
    };
    report(
        4,
        "discrete reconstruction roundtrip",
        started,
        1.0,
        format!(
            "max tv {worst_tv:.2e}, power-law gap {worst_weight_gap:.2e}, upsilon00 err {:.2e}{clamp_note}",
            (upsilon_00 - oracle).abs()
        ),
    );
}

#[test]
fn criterion_05_palm_bayes_equivalence() {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for seed in 9001..9011u64 {
        let p = random_measure::<f64>(3, 4, seed).unwrap();
        for spec in [
            ThinningSpec::independent(0.35).unwrap(),
            ThinningSpec::<f64>::type2_binom_inverse(),
        ] {
            let c = condensation_kernel(&p, &spec).unwrap();
            for (nu, _) in c.thinned.iter() {
                let palm_split = palm_splitting_kernel(&p, &spec, nu).unwrap();
                let bayes_row = c.table.row(nu).unwrap();
                for (kappa, w) in palm_split.iter() {
                    worst = worst.max((w - bayes_row.mass(&nu.plus(kappa))).abs());
                }
                for (mu, w) in bayes_row.iter() {
                    let kappa = mu.minus(nu).unwrap();
                    worst = worst.max((w - palm_split.mass(&kappa)).abs());
                }
            }
        }
    }
    assert!(worst < 1e-10, "atomwise gap {worst}");
    report(
        5,
        "Palm-Bayes splitting equivalence (10 seeds, both types)",
        started,
        30.0,
        format!("max atomwise gap {worst:.2e}"),
    );
}

#[test]
fn criterion_06_exact_point_process_ibp() {
    let started = Instant::now();

    let space = GroundSpace::new(vec![0.6f64, 0.4]).unwrap();
    let poisson = poisson_counts_measure(&space, 9)
        .unwrap()
        .normalized()
        .unwrap();
    let random = random_measure::<f64>(2, 5, 4242).unwrap();

    let mut worst = 0.0f64;
    for p in [&poisson, &random] {
        for spec in [
            ThinningSpec::independent(0.5).unwrap(),
            ThinningSpec::<f64>::type2_binom_inverse(),
        ] {
            let residual = verify_ibp_exact(p, &spec).unwrap();
            assert!(residual < 1e-10, "ibp residual {residual}");
            worst = worst.max(residual);
        }
    }

    // Mixed-sample counts k! (k+1)^-alpha with the uniform type-2 thinning:
    // the add-one kernel is ((m+1)/(m+2))^(alpha+1) per unit of site mass.
    let alpha = 2.0f64;
    let mut weights = Vec::new();
    let mut factorial = 1.0f64;
    for k in 0..=9usize {
        if k > 0 {
            factorial *= k as f64;
        }
        weights.push(factorial * ((k + 1) as f64).powf(-alpha));
    }
    let mixed = mixed_sample_measure(&space, &weights).unwrap();
    let type2 = ThinningSpec::<f64>::type2_binom_inverse();
    let mut worst_kernel_gap = 0.0f64;
    for (mu, _) in mixed.iter() {
        let m = mu.total();
        if m + 1 >= weights.len() {
            continue;
        }
        let pi = papangelou_kernel_exact(&mixed, &type2, mu).unwrap();
        let factor = ((m as f64 + 1.0) / (m as f64 + 2.0)).powf(alpha + 1.0);
        for (site, &mass) in pi.iter().enumerate() {
            let lam_hat = space.weight(site) / space.total_mass();
            worst_kernel_gap = worst_kernel_gap.max((mass - factor * lam_hat).abs());
        }
    }
    assert!(worst_kernel_gap < 1e-12, "mixed kernel gap {worst_kernel_gap}");
    let mixed_residual = verify_ibp_exact(&mixed, &type2).unwrap();
    assert!(mixed_residual < 1e-10, "mixed ibp residual {mixed_residual}");

    report(
        6,
        "exact point-process integration by parts",
        started,
        30.0,
        format!(
            "max residual {:.2e}, mixed kernel gap {worst_kernel_gap:.2e}",
            worst.max(mixed_residual)
        ),
    );
}

#[test]
fn criterion_07_point_process_reconstruction() {
    let started = Instant::now();
    let mut worst_tv = 0.0f64;
    for seed in [7001u64, 7002, 7003] {
        let p = random_measure::<f64>(2, 4, seed).unwrap();
        for spec in [
            ThinningSpec::independent(0.3).unwrap(),
            ThinningSpec::<f64>::type2_binom_inverse(),
        ] {
            let t = thinning_table(&spec, 2, 4).unwrap();
            let c = condensation_kernel(&p, &spec).unwrap();
            let rec = reconstruct_pp(&t, &c.table, 2, 4).unwrap();
            assert!(rec.identity_residual < 1e-9);
            let recovered = rec.p_normalized.expect("finite");
            let tv = recovered.tv_distance(&p);
            assert!(tv < 1e-9, "seed {seed}: tv {tv}");
            worst_tv = worst_tv.max(tv);
        }
    }
    report(
        7,
        "point-process reconstruction roundtrip",
        started,
        60.0,
        format!("max tv {worst_tv:.2e}"),
    );
}

#[test]
fn criterion_08_mc_poisson_thinning() {
    let started = Instant::now();
    let mut detail = String::new();
    for seed in [20240801u64, 20240802] {
        let report = mc_verify_poisson_thinning(4.0, 0.5, 2, 100_000, seed).unwrap();
        assert!(
            report.kept_mean_z < 3.0,
            "seed {seed}: kept mean {} z {}",
            report.kept_mean.mean,
            report.kept_mean_z
        );
        assert!(
            report.covariance_z < 3.0,
            "seed {seed}: covariance {} z {}",
            report.covariance.mean,
            report.covariance_z
        );
        detail = format!(
            "last seed: mean {:.4} (z {:.2}), cov {:.4} (z {:.2})",
            report.kept_mean.mean, report.kept_mean_z, report.covariance.mean, report.covariance_z
        );
    }
    report(8, "Monte Carlo Poisson thinning (2 seeds)", started, 60.0, detail);
}

#[test]
fn criterion_09_mc_integration_by_parts() {
    let started = Instant::now();
    let mut weights = Vec::new();
    let mut factorial = 1.0f64;
    for k in 0..=25usize {
        if k > 0 {
            factorial *= k as f64;
        }
        weights.push(factorial * ((k + 1) as f64).powi(-2));
    }
    let mut worst_z = 0.0f64;
    for seed in [31001u64, 31002] {
        let poisson = mc_verify_ibp(
            &ProcessSpec::Poisson { rate: 4.0 },
            &McThinning::independent(0.5).unwrap(),
            &GFunction::CountLeftHalf,
            2,
            100_000,
            seed,
        )
        .unwrap();
        assert!(poisson.z_score < 3.0, "seed {seed}: poisson {poisson:?}");
        let mixed = mc_verify_ibp(
            &ProcessSpec::Mixed {
                weights: weights.clone(),
                rate: 1.0,
            },
            &McThinning::binom_inverse(),
            &GFunction::CountLeftHalf,
            2,
            100_000,
            seed,
        )
        .unwrap();
        assert!(mixed.z_score < 3.0, "seed {seed}: mixed {mixed:?}");
        worst_z = worst_z.max(poisson.z_score).max(mixed.z_score);
    }
    report(
        9,
        "Monte Carlo integration by parts (poisson + mixed, 2 seeds)",
        started,
        120.0,
        format!("max z {worst_z:.2}"),
    );
}

#[test]
fn criterion_10_count_level_consistency() {
    let started = Instant::now();
    let n_max = 25usize;
    let lambda = 2.0f64;
    let q = 0.5f64;

    let nu = make_dist(&DistSpec::Poisson { lambda }, n_max, 1.0).unwrap();
    let t = make_thinning(&ThinSpec::Independent { q }, n_max).unwrap();
    let c = condense(&nu, &t).unwrap();

    let space = GroundSpace::new(vec![lambda]).unwrap();
    let p = poisson_counts_measure(&space, n_max).unwrap();
    let spec = ThinningSpec::independent(q).unwrap();
    let pp_c = condensation_kernel(&p, &spec).unwrap();

    let mut worst = 0.0f64;
    // Thinning rows against the binomial matrix rows.
    for n in 0..=n_max {
        let mu = PointConfig::new(vec![n as u32]);
        let row = thinning_kernel(&spec, &mu).unwrap();
        for k in 0..=n {
            let eta = PointConfig::new(vec![k as u32]);
            worst = worst.max((row.mass(&eta) - t.get(n, k)).abs());
        }
    }
    // Measure weights against the pmf.
    for mu in enumerate_configs_up_to(1, n_max).unwrap() {
        worst = worst.max((p.mass(&mu) - nu.weight(mu.total())).abs());
    }
    // Condensation rows against the matrix rows, wherever both are real.
    for (eta, row) in pp_c.table.iter() {
        let k = eta.total();
        if c.thinned.weight(k) <= 1e-14 {
            continue;
        }
        for n in k..=n_max {
            let mu = PointConfig::new(vec![n as u32]);
            worst = worst.max((row.mass(&mu) - c.matrix.get(k, n)).abs());
        }
    }
    // Palm splitting against the splitting view.
    let ups = splitting_of(&c.matrix).unwrap();
    for k in 0..=6usize {
        let eta = PointConfig::new(vec![k as u32]);
        let split = palm_splitting_kernel(&p, &spec, &eta).unwrap();
        for l in 0..=6usize {
            let kappa = PointConfig::new(vec![l as u32]);
            worst = worst.max((split.mass(&kappa) - ups.get(k, l)).abs());
        }
    }

    assert!(worst < 1e-12, "count-level gap {worst}");
    report(
        10,
        "count-level consistency (single site vs matrices)",
        started,
        30.0,
        format!("max gap {worst:.2e}"),
    );
}
