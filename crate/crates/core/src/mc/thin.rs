use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::mc::{McError, SimpleConfig};
use crate::special::binomial_u128;

/// Largest configuration the subset enumeration accepts (2^22 weights).
/// Larger configurations are rejected rather than approximated.
pub const SUBSET_CAP: usize = 22;

/// Type-1 weight of a kept subset of points.
pub type SubsetWeight = Arc<dyn Fn(&[[f64; 2]]) -> f64 + Send + Sync>;
/// Type-2 size weight `t(n, k)`.
pub type SizeWeight = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;

/// A thinning acting on simple configurations by exact subset enumeration.
#[derive(Clone)]
pub enum McThinning {
    /// Every point survives independently with probability `q`.
    IndependentQ { q: f64 },
    /// Survival probability `q(x)` constant on the four quadrants of the
    /// unit square (halves of the unit interval in dimension one, using the
    /// first two cells).
    PiecewiseQ { qs: [f64; 4] },
    /// Type-1 weight of the kept subset.
    Type1(SubsetWeight),
    /// Type-2 size weight `t(n, k)`.
    Type2(SizeWeight),
}

impl McThinning {
    pub fn independent(q: f64) -> Result<Self, McError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(McError::InvalidParameter(format!(
                "survival probability must lie in (0,1), got {q}"
            )));
        }
        Ok(Self::IndependentQ { q })
    }

    pub fn piecewise(qs: [f64; 4]) -> Result<Self, McError> {
        if qs.iter().any(|&q| !(q > 0.0 && q < 1.0)) {
            return Err(McError::InvalidParameter(
                "quadrant survival probabilities must lie in (0,1)".into(),
            ));
        }
        Ok(Self::PiecewiseQ { qs })
    }

    /// The uniform type-2 thinning `t(n, k) = 1 / C(n, k)`.
    pub fn binom_inverse() -> Self {
        Self::Type2(Arc::new(|n, k| {
            1.0 / binomial_u128(n as u64, k as u64) as f64
        }))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::IndependentQ { .. } => "independent",
            Self::PiecewiseQ { .. } => "piecewise",
            Self::Type1(_) => "type1",
            Self::Type2(_) => "type2",
        }
    }

    /// Quadrant index of a point: left/right split first, bottom/top second.
    pub fn quadrant(point: [f64; 2]) -> usize {
        let x = usize::from(point[0] >= 0.5);
        let y = usize::from(point[1] >= 0.5);
        x + 2 * y
    }

    fn mask_weight(&self, config: &SimpleConfig, mask: u32) -> f64 {
        match self {
            Self::IndependentQ { q } => {
                let k = mask.count_ones() as i32;
                (q / (1.0 - q)).powi(k)
            }
            Self::PiecewiseQ { qs } => {
                let mut w = 1.0;
                for (i, &p) in config.points.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        let q = qs[Self::quadrant(p)];
                        w *= q / (1.0 - q);
                    }
                }
                w
            }
            Self::Type1(weight) => {
                let subset: Vec<[f64; 2]> = config
                    .points
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << *i) != 0)
                    .map(|(_, &p)| p)
                    .collect();
                weight(&subset)
            }
            Self::Type2(weight) => weight(config.len(), mask.count_ones() as usize),
        }
    }
}

impl fmt::Debug for McThinning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::IndependentQ { q } => write!(f, "McThinning::IndependentQ({q})"),
            Self::PiecewiseQ { qs } => write!(f, "McThinning::PiecewiseQ({qs:?})"),
            Self::Type1(_) => f.write_str("McThinning::Type1"),
            Self::Type2(_) => f.write_str("McThinning::Type2"),
        }
    }
}

/// The exact subset distribution of the thinning on `config`: probabilities
/// indexed by bitmask, and the normalization `Z_μ` (the reciprocal of the
/// raw weight total).
pub fn thin_distribution(
    spec: &McThinning,
    config: &SimpleConfig,
) -> Result<(Vec<f64>, f64), McError> {
    let n = config.len();
    if n > SUBSET_CAP {
        return Err(McError::SubsetCapExceeded {
            size: n,
            cap: SUBSET_CAP,
        });
    }
    let size = 1usize << n;
    let mut weights = Vec::with_capacity(size);
    let mut total = 0.0f64;
    for mask in 0..size as u32 {
        let w = spec.mask_weight(config, mask);
        if !(w >= 0.0) || !w.is_finite() {
            return Err(McError::InvalidParameter(
                "thinning weight must be non-negative and finite".into(),
            ));
        }
        total += w;
        weights.push(w);
    }
    if !(total > 0.0) {
        return Err(McError::AllZeroWeights { size: n });
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
    Ok((weights, 1.0 / total))
}

/// Splits `config` into a kept and a removed part by sampling one subset
/// from the exact thinning distribution.
pub fn thin_config(
    spec: &McThinning,
    config: &SimpleConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(SimpleConfig, SimpleConfig), McError> {
    let (probs, _z) = thin_distribution(spec, config)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut chosen = probs.len() - 1;
    for (mask, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            chosen = mask;
            break;
        }
    }
    let mut kept = SimpleConfig::empty(config.dim);
    let mut removed = SimpleConfig::empty(config.dim);
    for (i, &p) in config.points.iter().enumerate() {
        if chosen & (1 << i) != 0 {
            kept.points.push(p);
        } else {
            removed.points.push(p);
        }
    }
    Ok((kept, removed))
}
