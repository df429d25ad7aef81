use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mc::{McError, SimpleConfig};

/// Attempts before the rejection sampler gives up; at this point the
/// acceptance rate is below 1e-4 with overwhelming probability.
const MAX_REJECTIONS: u64 = 10_000;

/// A pairwise potential given as a step function of the inter-point
/// distance: `φ(r) = values[floor(r / bin_width)]`, zero beyond the grid.
/// Values must be non-negative and finite, so configurations are never
/// favoured over the dominating Poisson draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPotential {
    pub bin_width: f64,
    pub values: Vec<f64>,
}

impl PairPotential {
    pub fn validate(&self) -> Result<(), McError> {
        if !(self.bin_width > 0.0) || !self.bin_width.is_finite() {
            return Err(McError::InvalidParameter(format!(
                "pair potential bin width must be positive, got {}",
                self.bin_width
            )));
        }
        if self.values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(McError::InvalidParameter(
                "pair potential values must be non-negative and finite".into(),
            ));
        }
        Ok(())
    }

    pub fn phi(&self, distance: f64) -> f64 {
        let bin = (distance / self.bin_width).floor();
        if bin < 0.0 || bin >= self.values.len() as f64 {
            0.0
        } else {
            self.values[bin as usize]
        }
    }

    /// Energy of adding `x` to `config`: the sum of pair terms against the
    /// existing points.
    pub fn increment(&self, x: [f64; 2], config: &SimpleConfig) -> f64 {
        config
            .points
            .iter()
            .map(|p| {
                let dx = p[0] - x[0];
                let dy = p[1] - x[1];
                self.phi((dx * dx + dy * dy).sqrt())
            })
            .sum()
    }

    /// Total energy accumulated point by point in insertion order.
    pub fn total(&self, config: &SimpleConfig) -> f64 {
        let mut acc = 0.0;
        let mut partial = SimpleConfig::empty(config.dim);
        for &p in &config.points {
            acc += self.increment(p, &partial);
            partial.points.push(p);
        }
        acc
    }
}

/// A point process on `[0,1]^d` with intensity base `rate ×` uniform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessSpec {
    /// Poisson: count ~ Poisson(rate), points i.i.d. uniform.
    Poisson { rate: f64 },
    /// Mixed sample: count mass proportional to `weights[n] rate^n / n!`,
    /// points i.i.d. uniform. Weights obey the hole rule.
    Mixed { weights: Vec<f64>, rate: f64 },
    /// Pairwise interaction: density `exp(−V)` against Poisson(rate).
    Interaction {
        potential: PairPotential,
        rate: f64,
    },
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<(), McError> {
        let check_rate = |rate: f64| {
            if !(rate > 0.0) || !rate.is_finite() || rate > 700.0 {
                Err(McError::InvalidParameter(format!(
                    "rate must lie in (0, 700], got {rate}"
                )))
            } else {
                Ok(())
            }
        };
        match self {
            ProcessSpec::Poisson { rate } => check_rate(*rate),
            ProcessSpec::Mixed { weights, rate } => {
                check_rate(*rate)?;
                if weights.is_empty() {
                    return Err(McError::InvalidParameter("empty count weights".into()));
                }
                let mut dead = None;
                for (index, &w) in weights.iter().enumerate() {
                    if !(w >= 0.0) || !w.is_finite() {
                        return Err(McError::InvalidParameter(format!(
                            "count weight {index} must be non-negative and finite"
                        )));
                    }
                    if w == 0.0 {
                        dead.get_or_insert(index);
                    } else if dead.is_some() {
                        return Err(McError::CountWeightHole { index });
                    }
                }
                if weights.iter().all(|&w| w == 0.0) {
                    return Err(McError::InvalidParameter(
                        "count weights must carry some mass".into(),
                    ));
                }
                Ok(())
            }
            ProcessSpec::Interaction { potential, rate } => {
                check_rate(*rate)?;
                potential.validate()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProcessSpec::Poisson { .. } => "poisson",
            ProcessSpec::Mixed { .. } => "mixed",
            ProcessSpec::Interaction { .. } => "interaction",
        }
    }

    /// Count distribution of the mixed-sample process, normalized.
    pub(crate) fn mixed_count_pmf(weights: &[f64], rate: f64) -> Vec<f64> {
        let mut pmf = Vec::with_capacity(weights.len());
        let mut scale = 1.0; // rate^n / n!
        for (n, &w) in weights.iter().enumerate() {
            if n > 0 {
                scale *= rate / n as f64;
            }
            pmf.push(w * scale);
        }
        let total: f64 = pmf.iter().sum();
        for p in pmf.iter_mut() {
            *p /= total;
        }
        pmf
    }
}

fn uniform_point(rng: &mut ChaCha8Rng, dim: usize) -> [f64; 2] {
    let x: f64 = rng.random();
    let y: f64 = if dim == 2 { rng.random() } else { 0.0 };
    [x, y]
}

fn poisson_count(rng: &mut ChaCha8Rng, rate: f64) -> usize {
    // Product-of-uniforms inversion; fine for the desk-scale rates here.
    let threshold = (-rate).exp();
    let mut count = 0usize;
    let mut acc: f64 = 1.0;
    loop {
        acc *= rng.random::<f64>();
        if acc <= threshold {
            return count;
        }
        count += 1;
    }
}

fn sample_counted(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> SimpleConfig {
    let mut config = SimpleConfig::empty(dim);
    for _ in 0..count {
        let p = uniform_point(rng, dim);
        config.points.push(p);
    }
    config
}

/// Draws one realization from the given stream of the seed.
pub fn sample_process_stream(
    spec: &ProcessSpec,
    dim: usize,
    seed: u64,
    stream: u64,
) -> Result<SimpleConfig, McError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    sample_process_with(spec, dim, &mut rng)
}

/// Draws one realization from stream zero of the seed.
pub fn sample_process(spec: &ProcessSpec, dim: usize, seed: u64) -> Result<SimpleConfig, McError> {
    sample_process_stream(spec, dim, seed, 0)
}

pub(crate) fn sample_process_with(
    spec: &ProcessSpec,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SimpleConfig, McError> {
    spec.validate()?;
    if dim != 1 && dim != 2 {
        return Err(McError::InvalidParameter(format!(
            "dimension must be 1 or 2, got {dim}"
        )));
    }
    match spec {
        ProcessSpec::Poisson { rate } => {
            let count = poisson_count(rng, *rate);
            Ok(sample_counted(rng, dim, count))
        }
        ProcessSpec::Mixed { weights, rate } => {
            let pmf = ProcessSpec::mixed_count_pmf(weights, *rate);
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut count = pmf.len() - 1;
            for (n, &p) in pmf.iter().enumerate() {
                acc += p;
                if u < acc {
                    count = n;
                    break;
                }
            }
            Ok(sample_counted(rng, dim, count))
        }
        ProcessSpec::Interaction { potential, rate } => {
            // Rejection against the dominating Poisson: V >= 0 means the
            // acceptance probability exp(-V) needs no extra bound.
            let mut attempts = 0u64;
            loop {
                let count = poisson_count(rng, *rate);
                let proposal = sample_counted(rng, dim, count);
                // Sequential accumulation over the insertion order.
                let energy = potential.total(&proposal);
                let u: f64 = rng.random();
                if u < (-energy).exp() {
                    return Ok(proposal);
                }
                attempts += 1;
                if attempts >= MAX_REJECTIONS {
                    return Err(McError::LowAcceptance {
                        attempts,
                        floor: 1.0 / MAX_REJECTIONS as f64,
                    });
                }
            }
        }
    }
}
