use std::time::Instant;

use serde_json::{json, Value};

use thincond_core::dist::{
    condense, detailed_balance_residual, papangelou_fn, reconstruct, splitting_of, thin,
    verify_cycle_excluding, verify_ibp, IbpFamily, RatioMode,
};
use thincond_core::mc::{mc_verify_ibp, mc_verify_poisson_thinning, GFunction};
use thincond_core::pp::{
    condensation_kernel, mixed_sample_measure, palm_splitting_kernel, poisson_counts_measure,
    random_measure, reconstruct_pp, thinning_table, verify_cycle_kernels, verify_ibp_exact,
    ConfigMeasure, GroundSpace,
};
use thincond_core::zoo::{make_dist, make_thinning};

use crate::descriptors;
use crate::job::{
    CycleParams, DistPairParams, PapangelouParams, PpExactParams, PpMcParams, RawJob,
    ReconstructParams,
};
use crate::report::{matrix_value, measure_value, pmf_value, Report, Verdict};

#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn bad(message: String) -> CliError {
    CliError(message)
}

pub fn execute(job: &RawJob) -> Result<Report, CliError> {
    let started = Instant::now();
    let mut report = match job.command.as_str() {
        "thin" => run_thin(parse(job)?),
        "condense" => run_condense(parse(job)?),
        "split" => run_split(parse(job)?),
        "papangelou" => run_papangelou(parse(job)?),
        "verify-balance" => run_verify_balance(parse(job)?),
        "verify-ibp" => run_verify_ibp(parse(job)?),
        "verify-cycle" => run_verify_cycle(parse(job)?),
        "reconstruct" => run_reconstruct(parse(job)?),
        "pp-exact" => run_pp_exact(parse(job)?),
        "pp-mc" => run_pp_mc(parse(job)?),
        other => Err(bad(format!("unknown command `{other}`"))),
    }?;
    report.wall_clock_ms = started.elapsed().as_millis() as u64;
    Ok(report)
}

fn parse<P: serde::de::DeserializeOwned>(job: &RawJob) -> Result<P, CliError> {
    serde_json::from_value(job.params.clone())
        .map_err(|e| bad(format!("invalid parameters for `{}`: {e}", job.command)))
}

struct DistPair {
    nu: thincond_core::TruncatedPmf64,
    t: thincond_core::TriMatrix64,
}

fn build_pair(dist: &str, thinning: &str, nmax: usize) -> Result<DistPair, CliError> {
    let dist = descriptors::dist_spec(dist).map_err(bad)?;
    let thin_spec = descriptors::thin_spec(thinning).map_err(bad)?;
    let nu = make_dist(&dist, nmax, descriptors::dist_tail_tol(&dist))?;
    let t = make_thinning(&thin_spec, nu.n_max())?;
    Ok(DistPair { nu, t })
}

fn inputs_of<P: serde::Serialize>(params: &P) -> Value {
    serde_json::to_value(params).expect("params serialize")
}

fn run_thin(params: DistPairParams) -> Result<Report, CliError> {
    let pair = build_pair(&params.dist, &params.thinning, params.nmax)?;
    let thinned = thin(&pair.nu, &pair.t)?;
    let mut report = Report::new("thin", inputs_of(&params));
    let mass_gap = (thinned.total() - pair.nu.total()).abs();
    report.results = json!({
        "law": pmf_value(&pair.nu),
        "thinned": pmf_value(&thinned),
    });
    report.residuals = json!({ "mass_transport_gap": mass_gap });
    report
        .verdicts
        .push(Verdict::at_most("mass_conserved", mass_gap, 1e-12));
    Ok(report)
}

fn run_condense(params: DistPairParams) -> Result<Report, CliError> {
    let tol = params.tol.unwrap_or(1e-11);
    let pair = build_pair(&params.dist, &params.thinning, params.nmax)?;
    let c = condense(&pair.nu, &pair.t)?;
    let mut balance = 0.0f64;
    for k in 0..=pair.nu.n_max() {
        if c.thinned.weight(k) <= 1e-14 {
            continue;
        }
        for n in k..=pair.nu.n_max() {
            let lhs = c.thinned.weight(k) * c.matrix.get(k, n);
            let rhs = pair.nu.weight(n) * pair.t.get(n, k);
            balance = balance.max((lhs - rhs).abs());
        }
    }
    let mut report = Report::new("condense", inputs_of(&params));
    report.results = json!({
        "condensation": matrix_value(&c.matrix),
        "thinned": pmf_value(&c.thinned),
        "pathological_rows": c.pathological_rows,
    });
    report.residuals = json!({ "balance": balance });
    report
        .verdicts
        .push(Verdict::at_most("balance_equations", balance, tol));
    Ok(report)
}

fn run_split(params: DistPairParams) -> Result<Report, CliError> {
    let pair = build_pair(&params.dist, &params.thinning, params.nmax)?;
    let c = condense(&pair.nu, &pair.t)?;
    let view = splitting_of(&c.matrix)?;
    let rows = view.to_rows();
    let worst_row_gap = rows
        .iter()
        .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0f64, f64::max);
    let mut report = Report::new("split", inputs_of(&params));
    report.results = json!({
        "splitting_rows": rows,
        "thinned": pmf_value(&c.thinned),
    });
    report.residuals = json!({ "row_stochasticity": worst_row_gap });
    report
        .verdicts
        .push(Verdict::at_most("rows_stochastic", worst_row_gap, 1e-12));
    Ok(report)
}

fn run_papangelou(params: PapangelouParams) -> Result<Report, CliError> {
    let mode = match params.mode.as_deref() {
        None | Some("raw") => RatioMode::Raw,
        Some("thinning-normalized") => RatioMode::ThinningNormalized,
        Some(other) => return Err(bad(format!("unknown mode `{other}`"))),
    };
    let tol = params.tol.unwrap_or(1e-12);
    let pair = build_pair(&params.dist, &params.thinning, params.nmax)?;
    let c = condense(&pair.nu, &pair.t)?;
    let seq = papangelou_fn(&pair.t, &c.matrix, mode)?;
    // Birth-death consistency against the raw sequence.
    let raw = papangelou_fn(&pair.t, &c.matrix, RatioMode::Raw)?;
    let mut consistency = 0.0f64;
    for n in 0..pair.nu.n_max() {
        if c.thinned.weight(n) <= 1e-14 {
            continue;
        }
        let death = pair.t.get(n + 1, n) / pair.t.get(n, n);
        consistency = consistency
            .max((pair.nu.weight(n + 1) * death - pair.nu.weight(n) * raw.values[n]).abs());
    }
    let mut report = Report::new("papangelou", inputs_of(&params));
    report.results = json!({
        "values": seq.values,
        "cutoff": seq.cutoff,
    });
    report.residuals = json!({ "birth_death_consistency": consistency });
    report
        .verdicts
        .push(Verdict::at_most("birth_death_consistency", consistency, tol));
    Ok(report)
}

fn run_verify_balance(params: DistPairParams) -> Result<Report, CliError> {
    let tol = params.tol.unwrap_or(1e-11);
    let pair = build_pair(&params.dist, &params.thinning, params.nmax)?;
    let c = condense(&pair.nu, &pair.t)?;
    let residuals = detailed_balance_residual(&pair.nu, &pair.t, &c.matrix)?;
    let max_residual = residuals.iter().copied().fold(0.0f64, f64::max);
    let mut report = Report::new("verify-balance", inputs_of(&params));
    report.results = json!({ "residuals": residuals });
    report.residuals = json!({ "detailed_balance": max_residual });
    report
        .verdicts
        .push(Verdict::at_most("detailed_balance", max_residual, tol));
    Ok(report)
}

fn run_verify_ibp(params: DistPairParams) -> Result<Report, CliError> {
    let tol = params.tol.unwrap_or(1e-11);
    let pair = build_pair(&params.dist, &params.thinning, params.nmax)?;
    let c = condense(&pair.nu, &pair.t)?;
    let residual = verify_ibp(&pair.nu, &pair.t, &c.matrix, IbpFamily::Indicators)?;
    let mut report = Report::new("verify-ibp", inputs_of(&params));
    report.results = json!({ "max_residual": residual });
    report.residuals = json!({ "integration_by_parts": residual });
    report
        .verdicts
        .push(Verdict::at_most("integration_by_parts", residual, tol));
    Ok(report)
}

fn run_verify_cycle(params: CycleParams) -> Result<Report, CliError> {
    let tol = params.tol.unwrap_or(1e-10);
    let pair = build_pair(&params.dist, &params.thinning, params.nmax)?;
    let n_cap = params.ncap.unwrap_or(25).min(pair.nu.n_max());
    let c = condense(&pair.nu, &pair.t)?;
    let rep = verify_cycle_excluding(&pair.t, &c.matrix, n_cap, &c.pathological_rows)?;
    let mut report = Report::new("verify-cycle", inputs_of(&params));
    report.results = json!({
        "max_violation": rep.max_violation,
        "worst_quadruple": rep.worst,
        "n_cap": n_cap,
    });
    report.residuals = json!({ "cycle": rep.max_violation });
    report
        .verdicts
        .push(Verdict::at_most("alternating_cycle", rep.max_violation, tol));
    Ok(report)
}

fn run_reconstruct(params: ReconstructParams) -> Result<Report, CliError> {
    let tol = params.tol.unwrap_or(1e-9);
    let pair = build_pair(&params.condensation_from, &params.thinning, params.nmax)?;
    let c = condense(&pair.nu, &pair.t)?;
    let rec = reconstruct(&pair.t, &c.matrix, pair.nu.n_max())?;
    let recovered = rec
        .normalized
        .as_ref()
        .ok_or_else(|| bad("window mass is not normalizable".into()))?;
    let tv = recovered.tv_distance(&pair.nu.renormalized()?);
    let mut report = Report::new("reconstruct", inputs_of(&params));
    report.results = json!({
        "reconstructed": pmf_value(recovered),
        "unnormalized_head": rec.measure.weights().iter().take(12).copied().collect::<Vec<_>>(),
        "cutoff": rec.cutoff,
        "finite": rec.finite,
        "window_limited": rec.window_limited,
        "total_mass": rec.total_mass,
        "tail_ratio": rec.tail_ratio,
    });
    report.residuals = json!({
        "roundtrip_tv": tv,
        "balance": rec.balance_residual,
    });
    report
        .verdicts
        .push(Verdict::at_most("roundtrip_tv", tv, tol));
    if let Some(balance) = rec.balance_residual {
        report
            .verdicts
            .push(Verdict::at_most("balance_equations", balance, 1e-11));
    }
    Ok(report)
}

fn pp_space(params: &PpExactParams) -> Result<GroundSpace<f64>, CliError> {
    let weights = match &params.site_weights {
        Some(text) => text
            .split(';')
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| bad(format!("bad site weight `{v}`")))
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![1.0; params.sites],
    };
    if weights.len() != params.sites {
        return Err(bad(format!(
            "{} site weights for {} sites",
            weights.len(),
            params.sites
        )));
    }
    Ok(GroundSpace::new(weights)?)
}

fn pp_law(params: &PpExactParams) -> Result<ConfigMeasure<f64>, CliError> {
    let space = pp_space(params)?;
    Ok(match descriptors::pp_process(&params.process).map_err(bad)? {
        descriptors::PpProcess::Poisson => poisson_counts_measure(&space, params.nmax)?
            .normalized()?,
        descriptors::PpProcess::Mixed { alpha, len } => {
            let weights = descriptors::mixed_weights(alpha, len.min(params.nmax + 1));
            mixed_sample_measure(&space, &weights)?
        }
        descriptors::PpProcess::Random { seed } => {
            random_measure(params.sites, params.nmax, seed)?
        }
    })
}

fn run_pp_exact(params: PpExactParams) -> Result<Report, CliError> {
    let p = pp_law(&params)?;
    let spec = descriptors::pp_thinning(&params.pp_thinning).map_err(bad)?;
    let mut report = Report::new("pp-exact", inputs_of(&params));
    match params.action.as_str() {
        "condense" => {
            let tol = params.tol.unwrap_or(1e-12);
            let c = condensation_kernel(&p, &spec)?;
            let rows: Vec<Value> = c
                .table
                .iter()
                .map(|(eta, row)| {
                    json!({
                        "at": eta.counts(),
                        "row": measure_value(row),
                    })
                })
                .collect();
            let worst_row_gap = c
                .table
                .iter()
                .map(|(_, row)| (row.total() - 1.0).abs())
                .fold(0.0f64, f64::max);
            report.results = json!({
                "condensation_rows": rows,
                "thinned": measure_value(&c.thinned),
            });
            report.residuals = json!({ "row_stochasticity": worst_row_gap });
            report
                .verdicts
                .push(Verdict::at_most("rows_stochastic", worst_row_gap, tol));
        }
        "palm-check" => {
            let tol = params.tol.unwrap_or(1e-10);
            let c = condensation_kernel(&p, &spec)?;
            let mut worst = 0.0f64;
            for (nu, _) in c.thinned.iter() {
                let palm_split = palm_splitting_kernel(&p, &spec, nu)?;
                let bayes_row = c.table.row(nu).expect("row exists");
                for (kappa, w) in palm_split.iter() {
                    worst = worst.max((w - bayes_row.mass(&nu.plus(kappa))).abs());
                }
                for (mu, w) in bayes_row.iter() {
                    let kappa = mu.minus(nu).expect("supported above");
                    worst = worst.max((w - palm_split.mass(&kappa)).abs());
                }
            }
            report.results = json!({ "max_atomwise_gap": worst });
            report.residuals = json!({ "palm_vs_bayes": worst });
            report
                .verdicts
                .push(Verdict::at_most("palm_bayes_equivalence", worst, tol));
        }
        "ibp" => {
            let tol = params.tol.unwrap_or(1e-10);
            let residual = verify_ibp_exact(&p, &spec)?;
            report.results = json!({ "max_residual": residual });
            report.residuals = json!({ "integration_by_parts": residual });
            report
                .verdicts
                .push(Verdict::at_most("integration_by_parts", residual, tol));
        }
        "cycle" => {
            let tol = params.tol.unwrap_or(1e-10);
            let rep = verify_cycle_kernels(&p, &spec)?;
            let (kappa, mu, lambda, nu) = &rep.worst;
            report.results = json!({
                "max_violation": rep.max_violation,
                "worst_quadruple": [kappa.counts(), mu.counts(), lambda.counts(), nu.counts()],
            });
            report.residuals = json!({ "cycle": rep.max_violation });
            report
                .verdicts
                .push(Verdict::at_most("alternating_cycle", rep.max_violation, tol));
        }
        "reconstruct" => {
            let tol = params.tol.unwrap_or(1e-9);
            let t = thinning_table(&spec, params.sites, params.nmax)?;
            let c = condensation_kernel(&p, &spec)?;
            let rec = reconstruct_pp(&t, &c.table, params.sites, params.nmax)?;
            let recovered = rec
                .p_normalized
                .as_ref()
                .ok_or_else(|| bad("reconstructed mass is not normalizable".into()))?;
            let tv = recovered.tv_distance(&p);
            report.results = json!({
                "reconstructed": measure_value(recovered),
                "layer_masses": rec.layer_masses,
                "halt_layer": rec.halt_layer,
                "window_limited": rec.window_limited,
                "finite": rec.finite,
            });
            report.residuals = json!({
                "roundtrip_tv": tv,
                "disintegration_identity": rec.identity_residual,
            });
            report
                .verdicts
                .push(Verdict::at_most("roundtrip_tv", tv, tol));
            report.verdicts.push(Verdict::at_most(
                "disintegration_identity",
                rec.identity_residual,
                1e-9,
            ));
        }
        other => return Err(bad(format!("unknown pp-exact action `{other}`"))),
    }
    Ok(report)
}

fn run_pp_mc(params: PpMcParams) -> Result<Report, CliError> {
    let mut report = Report::new("pp-mc", inputs_of(&params));
    match params.action.as_str() {
        "thin-poisson" => {
            let rate = params.rate.unwrap_or(4.0);
            let q = params.q.unwrap_or(0.5);
            let rep =
                mc_verify_poisson_thinning(rate, q, params.dim, params.samples, params.seed)?;
            report.results = serde_json::to_value(&rep).expect("report serializes");
            report.residuals = json!({
                "kept_mean_z": rep.kept_mean_z,
                "covariance_z": rep.covariance_z,
                "count_tv": rep.count_tv,
            });
            report
                .verdicts
                .push(Verdict::at_most("kept_mean_z", rep.kept_mean_z, 3.0));
            report
                .verdicts
                .push(Verdict::at_most("removed_mean_z", rep.removed_mean_z, 3.0));
            report
                .verdicts
                .push(Verdict::at_most("covariance_z", rep.covariance_z, 3.0));
            report
                .verdicts
                .push(Verdict::at_most("count_tv", rep.count_tv, 0.01));
            report.verdicts.push(Verdict::at_least(
                "chi_square_p_value",
                rep.chi_square.p_value,
                0.001,
            ));
            for cell in &rep.cells {
                report.verdicts.push(Verdict::at_most(
                    &format!("cell_{}_z", cell.cell),
                    cell.z_score,
                    3.0,
                ));
            }
        }
        "ibp" => {
            let process = descriptors::mc_process(
                params.process.as_deref().unwrap_or("poisson:rate=4"),
            )
            .map_err(bad)?;
            let thinning = descriptors::mc_thinning(
                params.thinning.as_deref().unwrap_or("independent:q=0.5"),
            )
            .map_err(bad)?;
            let g = match params.g.as_deref() {
                None | Some("count-left-half") => GFunction::CountLeftHalf,
                Some("zero") => GFunction::Zero,
                Some(other) => return Err(bad(format!("unknown test function `{other}`"))),
            };
            let rep = mc_verify_ibp(
                &process,
                &thinning,
                &g,
                params.dim,
                params.samples,
                params.seed,
            )?;
            report.results = serde_json::to_value(rep).expect("report serializes");
            report.residuals = json!({ "z_score": rep.z_score });
            report
                .verdicts
                .push(Verdict::at_most("ibp_z_score", rep.z_score, 3.0));
        }
        other => return Err(bad(format!("unknown pp-mc action `{other}`"))),
    }
    Ok(report)
}
