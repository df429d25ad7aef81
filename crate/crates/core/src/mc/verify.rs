use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mc::process::sample_process_with;
use crate::mc::stats::{chi_square_pvalue, MCEstimate, RunningStats};
use crate::mc::thin::SizeWeight;
use crate::mc::{thin_config, McError, McThinning, PairPotential, ProcessSpec, SimpleConfig};
use crate::special::binomial_u128;

/// Fixed chunk length for parallel replica runs. Each replica draws from its
/// own stream and chunks are reduced in index order, so results do not
/// depend on the worker count.
const CHUNK: u64 = 4096;

/// A caller-supplied `g(x, μ)`.
pub type PointFunctional = Arc<dyn Fn([f64; 2], &SimpleConfig) -> f64 + Send + Sync>;

/// Test functions `g(x, μ)` for the Monte Carlo identity checks.
#[derive(Clone)]
pub enum GFunction {
    /// Identically zero; both sides must vanish exactly.
    Zero,
    /// `g(x, μ) = |μ| · 1[x₁ < 1/2]`, the default count-weighted half-space
    /// indicator.
    CountLeftHalf,
    Custom(PointFunctional),
}

impl GFunction {
    fn eval(&self, x: [f64; 2], config: &SimpleConfig) -> f64 {
        match self {
            GFunction::Zero => 0.0,
            GFunction::CountLeftHalf => {
                if x[0] < 0.5 {
                    config.len() as f64
                } else {
                    0.0
                }
            }
            GFunction::Custom(f) => f(x, config),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GFunction::Zero => "zero",
            GFunction::CountLeftHalf => "count_left_half",
            GFunction::Custom(_) => "custom",
        }
    }
}

/// Both sides of the integration-by-parts identity with the discrepancy in
/// standard-error units.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IbpMcReport {
    pub lhs: MCEstimate,
    pub rhs: MCEstimate,
    pub z_score: f64,
}

/// The normalization `Z_m` of the uniform-given-size thinning with size
/// weights `t`, `1 / Σ_j C(m, j) t(m, j)`.
fn type2_normalization(t: &SizeWeight, m: usize) -> f64 {
    let total: f64 = (0..=m)
        .map(|j| binomial_u128(m as u64, j as u64) as f64 * t(m, j))
        .sum();
    1.0 / total
}

enum IbpCombo {
    PoissonIndependent {
        rate: f64,
        q: f64,
    },
    PoissonPiecewise {
        rate: f64,
        qs: [f64; 4],
    },
    MixedType2 {
        weights: Vec<f64>,
        rate: f64,
        t: SizeWeight,
    },
    InteractionIndependent {
        potential: PairPotential,
        rate: f64,
        q: f64,
    },
    InteractionPiecewise {
        potential: PairPotential,
        rate: f64,
        qs: [f64; 4],
    },
}

impl IbpCombo {
    fn resolve(process: &ProcessSpec, thinning: &McThinning) -> Result<Self, McError> {
        match (process, thinning) {
            (ProcessSpec::Poisson { rate }, McThinning::IndependentQ { q }) => {
                Ok(IbpCombo::PoissonIndependent { rate: *rate, q: *q })
            }
            (ProcessSpec::Poisson { rate }, McThinning::PiecewiseQ { qs }) => {
                Ok(IbpCombo::PoissonPiecewise {
                    rate: *rate,
                    qs: *qs,
                })
            }
            (ProcessSpec::Mixed { weights, rate }, McThinning::Type2(t)) => {
                Ok(IbpCombo::MixedType2 {
                    weights: weights.clone(),
                    rate: *rate,
                    t: t.clone(),
                })
            }
            (ProcessSpec::Interaction { potential, rate }, McThinning::IndependentQ { q }) => {
                Ok(IbpCombo::InteractionIndependent {
                    potential: potential.clone(),
                    rate: *rate,
                    q: *q,
                })
            }
            (ProcessSpec::Interaction { potential, rate }, McThinning::PiecewiseQ { qs }) => {
                Ok(IbpCombo::InteractionPiecewise {
                    potential: potential.clone(),
                    rate: *rate,
                    qs: *qs,
                })
            }
            _ => Err(McError::UnsupportedCombination {
                process: process.name(),
                thinning: thinning.name(),
            }),
        }
    }

    /// Weight of removing the point `x` from `config`.
    fn death_factor(&self, config: &SimpleConfig, x: [f64; 2]) -> f64 {
        match self {
            IbpCombo::PoissonIndependent { q, .. }
            | IbpCombo::InteractionIndependent { q, .. } => 1.0 - q,
            IbpCombo::PoissonPiecewise { qs, .. }
            | IbpCombo::InteractionPiecewise { qs, .. } => {
                1.0 - qs[McThinning::quadrant(x)]
            }
            IbpCombo::MixedType2 { t, .. } => {
                let m = config.len();
                let z_ratio = type2_normalization(t, m) / type2_normalization(t, m - 1);
                z_ratio * t(m, m - 1) / t(m - 1, m - 1)
            }
        }
    }

    /// Density of the add-one kernel at `x` given `config` (with respect to
    /// the Lebesgue measure on the unit cube).
    fn papangelou_density(&self, config: &SimpleConfig, x: [f64; 2]) -> f64 {
        match self {
            IbpCombo::PoissonIndependent { rate, q } => (1.0 - q) * rate,
            IbpCombo::PoissonPiecewise { rate, qs } => {
                (1.0 - qs[McThinning::quadrant(x)]) * rate
            }
            IbpCombo::MixedType2 { weights, rate, t } => {
                let m = config.len();
                if m + 1 >= weights.len() || weights[m] == 0.0 {
                    return 0.0;
                }
                let z_ratio = type2_normalization(t, m + 1) / type2_normalization(t, m);
                z_ratio * t(m + 1, m) / t(m, m) * weights[m + 1] / weights[m] * rate
            }
            IbpCombo::InteractionIndependent {
                potential,
                rate,
                q,
            } => (1.0 - q) * rate * (-potential.increment(x, config)).exp(),
            IbpCombo::InteractionPiecewise {
                potential,
                rate,
                qs,
            } => {
                (1.0 - qs[McThinning::quadrant(x)])
                    * rate
                    * (-potential.increment(x, config)).exp()
            }
        }
    }
}

/// Estimates both sides of the integration-by-parts identity
///
/// `E Σ_{x∈μ} g(x, μ) δ(μ, x)  =  E ∫ g(x, μ+δ_x) π(μ, dx)`
///
/// for a process whose add-one kernel is available in closed form. The left
/// side sums the death factor over sampled points; the right side draws one
/// extra uniform point per replica and weights it by the kernel density.
pub fn mc_verify_ibp(
    process: &ProcessSpec,
    thinning: &McThinning,
    g: &GFunction,
    dim: usize,
    n_samples: u64,
    seed: u64,
) -> Result<IbpMcReport, McError> {
    process.validate()?;
    if n_samples < 2 {
        return Err(McError::InvalidParameter(
            "need at least two samples".into(),
        ));
    }
    let combo = IbpCombo::resolve(process, thinning)?;

    let n_chunks = n_samples.div_ceil(CHUNK);
    let chunks: Vec<Result<(RunningStats, RunningStats), McError>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut lhs = RunningStats::new();
            let mut rhs = RunningStats::new();
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(n_samples);
            for replica in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(replica);
                let config = sample_process_with(process, dim, &mut rng)?;

                let mut removal = 0.0;
                for &x in &config.points {
                    let gv = g.eval(x, &config);
                    if gv != 0.0 {
                        removal += gv * combo.death_factor(&config, x);
                    }
                }
                lhs.push(removal);

                let extra = [
                    rand::Rng::random::<f64>(&mut rng),
                    if dim == 2 {
                        rand::Rng::random::<f64>(&mut rng)
                    } else {
                        0.0
                    },
                ];
                let grown = config.with_point(extra);
                let gv = g.eval(extra, &grown);
                let addition = if gv != 0.0 {
                    gv * combo.papangelou_density(&config, extra)
                } else {
                    0.0
                };
                rhs.push(addition);
            }
            Ok((lhs, rhs))
        })
        .collect();

    let mut lhs = RunningStats::new();
    let mut rhs = RunningStats::new();
    for chunk in chunks {
        let (l, r) = chunk?;
        lhs.merge(&l);
        rhs.merge(&r);
    }
    let lhs = lhs.estimate(seed);
    let rhs = rhs.estimate(seed);
    let spread = (lhs.stderr.powi(2) + rhs.stderr.powi(2)).sqrt();
    let z_score = if spread == 0.0 {
        if lhs.mean == rhs.mean {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (lhs.mean - rhs.mean).abs() / spread
    };
    Ok(IbpMcReport { lhs, rhs, z_score })
}

/// Pooled chi-square of an empirical count histogram against a pmf.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub degrees_of_freedom: u64,
    pub p_value: f64,
}

/// One spatial cell of the intensity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellReport {
    pub cell: usize,
    pub mean: f64,
    pub stderr: f64,
    pub expected: f64,
    pub z_score: f64,
}

/// Verification report for thinning a Poisson process.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoissonThinningReport {
    pub kept_mean: MCEstimate,
    pub expected_kept_mean: f64,
    pub kept_mean_z: f64,
    pub removed_mean: MCEstimate,
    pub expected_removed_mean: f64,
    pub removed_mean_z: f64,
    /// Sample covariance of kept and removed counts, with the standard
    /// error of the product estimator; independence makes it zero.
    pub covariance: MCEstimate,
    pub covariance_z: f64,
    /// Total-variation distance of the kept-count histogram from the
    /// Poisson(q·rate) law.
    pub count_tv: f64,
    pub chi_square: ChiSquareReport,
    /// Kept intensity over a four-cell partition of the domain.
    pub cells: Vec<CellReport>,
}

fn cell_of(point: [f64; 2], dim: usize) -> usize {
    if dim == 2 {
        McThinning::quadrant(point)
    } else {
        ((point[0] * 4.0) as usize).min(3)
    }
}

/// Samples a Poisson process, thins it by independent coin flips through the
/// exact subset law, and checks the kept points against Poisson(q·rate):
/// count mean, kept/removed independence, count histogram (TV and pooled
/// chi-square), and the intensity over a four-cell spatial partition.
pub fn mc_verify_poisson_thinning(
    rate: f64,
    q: f64,
    dim: usize,
    n_samples: u64,
    seed: u64,
) -> Result<PoissonThinningReport, McError> {
    let process = ProcessSpec::Poisson { rate };
    process.validate()?;
    let thinning = McThinning::independent(q)?;
    if n_samples < 2 {
        return Err(McError::InvalidParameter(
            "need at least two samples".into(),
        ));
    }

    #[derive(Clone, Copy, Default)]
    struct Sample {
        kept: u32,
        removed: u32,
        cells: [u16; 4],
    }

    let n_chunks = n_samples.div_ceil(CHUNK);
    let chunk_results: Vec<Result<Vec<Sample>, McError>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(n_samples);
            let mut out = Vec::with_capacity((hi - lo) as usize);
            for replica in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(replica);
                let config = sample_process_with(&process, dim, &mut rng)?;
                let (kept, removed) = thin_config(&thinning, &config, &mut rng)?;
                let mut cells = [0u16; 4];
                for &p in &kept.points {
                    cells[cell_of(p, dim)] += 1;
                }
                out.push(Sample {
                    kept: kept.len() as u32,
                    removed: removed.len() as u32,
                    cells,
                });
            }
            Ok(out)
        })
        .collect();

    let mut samples = Vec::with_capacity(n_samples as usize);
    for chunk in chunk_results {
        samples.extend(chunk?);
    }

    let mut kept_stats = RunningStats::new();
    let mut removed_stats = RunningStats::new();
    let mut cell_stats = [RunningStats::new(); 4];
    let mut histogram: Vec<u64> = Vec::new();
    for s in &samples {
        kept_stats.push(s.kept as f64);
        removed_stats.push(s.removed as f64);
        for (cell, stat) in cell_stats.iter_mut().enumerate() {
            stat.push(s.cells[cell] as f64);
        }
        if s.kept as usize >= histogram.len() {
            histogram.resize(s.kept as usize + 1, 0);
        }
        histogram[s.kept as usize] += 1;
    }

    // Covariance of kept and removed with the product-moment spread.
    let k_bar = kept_stats.mean();
    let r_bar = removed_stats.mean();
    let mut prod_stats = RunningStats::new();
    for s in &samples {
        prod_stats.push((s.kept as f64 - k_bar) * (s.removed as f64 - r_bar));
    }
    let n = n_samples as f64;
    let covariance = MCEstimate {
        mean: prod_stats.mean() * n / (n - 1.0),
        stderr: prod_stats.stderr(),
        n_samples,
        seed,
    };

    // Kept counts against Poisson(q * rate).
    let target = q * rate;
    let mut pmf = Vec::with_capacity(histogram.len());
    let mut mass = (-target).exp();
    for k in 0..histogram.len() {
        pmf.push(mass);
        mass *= target / (k as f64 + 1.0);
    }
    let tail: f64 = 1.0 - pmf.iter().sum::<f64>();
    let mut count_tv = tail.abs();
    for (k, &c) in histogram.iter().enumerate() {
        count_tv += (c as f64 / n - pmf[k]).abs();
    }
    count_tv /= 2.0;

    // Pooled chi-square: fold bins with expected count below 5 into the
    // tail, which also absorbs the mass beyond the histogram.
    let mut stat = 0.0;
    let mut bins = 0u64;
    let mut pooled_expected = tail * n;
    let mut pooled_observed = 0.0;
    for (k, &c) in histogram.iter().enumerate() {
        let expected = pmf[k] * n;
        if expected >= 5.0 {
            stat += (c as f64 - expected).powi(2) / expected;
            bins += 1;
        } else {
            pooled_expected += expected;
            pooled_observed += c as f64;
        }
    }
    if pooled_expected > 0.0 {
        stat += (pooled_observed - pooled_expected).powi(2) / pooled_expected;
        bins += 1;
    }
    let degrees_of_freedom = bins.saturating_sub(1).max(1);
    let chi_square = ChiSquareReport {
        statistic: stat,
        degrees_of_freedom,
        p_value: chi_square_pvalue(stat, degrees_of_freedom),
    };

    let expected_cell = target / 4.0;
    let cells = cell_stats
        .iter()
        .enumerate()
        .map(|(cell, stats)| {
            let est = stats.estimate(seed);
            CellReport {
                cell,
                mean: est.mean,
                stderr: est.stderr,
                expected: expected_cell,
                z_score: est.z_against(expected_cell),
            }
        })
        .collect();

    let kept_mean = kept_stats.estimate(seed);
    let removed_mean = removed_stats.estimate(seed);
    Ok(PoissonThinningReport {
        kept_mean_z: kept_mean.z_against(target),
        kept_mean,
        expected_kept_mean: target,
        removed_mean_z: removed_mean.z_against(rate - target),
        removed_mean,
        expected_removed_mean: rate - target,
        covariance_z: covariance.z_against(0.0),
        covariance,
        count_tv,
        chi_square,
        cells,
    })
}
