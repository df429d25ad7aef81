//! Parsing of `kind:key=val,key=val` descriptors into model specifications.

use std::collections::BTreeMap;

use thincond_core::mc::{McThinning, PairPotential, ProcessSpec};
use thincond_core::pp::ThinningSpec;
use thincond_core::zoo::{DistSpec, ThinSpec};

pub struct Descriptor {
    pub kind: String,
    args: BTreeMap<String, String>,
    used: std::cell::RefCell<Vec<String>>,
}

impl Descriptor {
    pub fn parse(text: &str) -> Result<Self, String> {
        let (kind, rest) = match text.split_once(':') {
            Some((k, r)) => (k, r),
            None => (text, ""),
        };
        if kind.is_empty() {
            return Err(format!("empty descriptor `{text}`"));
        }
        let mut args = BTreeMap::new();
        if !rest.is_empty() {
            for item in rest.split(',') {
                let (key, value) = item
                    .split_once('=')
                    .ok_or_else(|| format!("expected key=value in `{item}`"))?;
                args.insert(key.to_string(), value.to_string());
            }
        }
        Ok(Self {
            kind: kind.to_string(),
            args,
            used: std::cell::RefCell::new(Vec::new()),
        })
    }

    fn get(&self, key: &str) -> Option<&String> {
        self.used.borrow_mut().push(key.to_string());
        self.args.get(key)
    }

    pub fn f64(&self, key: &str) -> Result<f64, String> {
        self.get(key)
            .ok_or_else(|| format!("{}: missing `{key}`", self.kind))?
            .parse()
            .map_err(|_| format!("{}: `{key}` must be a number", self.kind))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, String> {
        match self.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| format!("{}: `{key}` must be a number", self.kind)),
            None => Ok(default),
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64, String> {
        self.get(key)
            .ok_or_else(|| format!("{}: missing `{key}`", self.kind))?
            .parse()
            .map_err(|_| format!("{}: `{key}` must be an integer", self.kind))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, String> {
        match self.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| format!("{}: `{key}` must be an integer", self.kind)),
            None => Ok(default),
        }
    }

    /// Semicolon-separated number list.
    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, String> {
        self.get(key)
            .ok_or_else(|| format!("{}: missing `{key}`", self.kind))?
            .split(';')
            .map(|v| {
                v.parse()
                    .map_err(|_| format!("{}: `{key}` holds a non-number `{v}`", self.kind))
            })
            .collect()
    }

    /// Rejects keys that no rule consumed.
    pub fn finish(self) -> Result<(), String> {
        let used = self.used.into_inner();
        for key in self.args.keys() {
            if !used.contains(key) {
                return Err(format!("{}: unknown key `{key}`", self.kind));
            }
        }
        Ok(())
    }
}

pub fn dist_spec(text: &str) -> Result<DistSpec<f64>, String> {
    let d = Descriptor::parse(text)?;
    let spec = match d.kind.as_str() {
        "poisson" => DistSpec::Poisson {
            lambda: d.f64("lambda")?,
        },
        "binomial" => DistSpec::Binomial {
            r: d.u64("r")?,
            p: d.f64("p")?,
        },
        "negbinomial" => DistSpec::NegBinomial {
            r: d.f64("r")?,
            p: d.f64("p")?,
        },
        "powerlaw" => DistSpec::PowerLaw {
            alpha: d.f64("alpha")?,
        },
        "pointmass" => DistSpec::PointMass {
            m: d.u64("m")? as usize,
        },
        "custom" => DistSpec::Custom {
            weights: d.f64_list("weights")?,
        },
        other => return Err(format!("unknown distribution kind `{other}`")),
    };
    d.finish()?;
    Ok(spec)
}

/// Tail tolerance for instantiating a law: tight for light tails, window
/// semantics for the power law whose tail cannot reach 1e-12 on any
/// affordable window.
pub fn dist_tail_tol(spec: &DistSpec<f64>) -> f64 {
    match spec {
        DistSpec::PowerLaw { .. } => 1.0,
        _ => 1e-9,
    }
}

pub fn thin_spec(text: &str) -> Result<ThinSpec<f64>, String> {
    let d = Descriptor::parse(text)?;
    let spec = match d.kind.as_str() {
        "independent" => ThinSpec::Independent { q: d.f64("q")? },
        "uniform" => ThinSpec::Uniform,
        "almost_nothing" | "almost-nothing" => ThinSpec::AlmostNothing { q: d.f64("q")? },
        "all_or_nothing" | "all-or-nothing" => ThinSpec::AllOrNothing { q: d.f64("q")? },
        other => return Err(format!("unknown thinning kind `{other}`")),
    };
    d.finish()?;
    Ok(spec)
}

pub fn pp_thinning(text: &str) -> Result<ThinningSpec<f64>, String> {
    let d = Descriptor::parse(text)?;
    let spec = match d.kind.as_str() {
        "independent" => {
            ThinningSpec::independent(d.f64("q")?).map_err(|e| e.to_string())?
        }
        "binom-inverse" | "binom_inverse" => ThinningSpec::type2_binom_inverse(),
        other => return Err(format!("unknown point-process thinning `{other}`")),
    };
    d.finish()?;
    Ok(spec)
}

/// Mixed-sample count weights `k! (k+1)^(-alpha)` for `k < len`.
pub fn mixed_weights(alpha: f64, len: usize) -> Vec<f64> {
    let mut weights = Vec::with_capacity(len);
    let mut factorial = 1.0f64;
    for k in 0..len {
        if k > 0 {
            factorial *= k as f64;
        }
        weights.push(factorial * ((k + 1) as f64).powf(-alpha));
    }
    weights
}

/// Point-process law selector for `pp-exact`: `poisson` (site weights as
/// rates), `mixed:alpha=2,len=8`, `random:seed=7`.
pub enum PpProcess {
    Poisson,
    Mixed { alpha: f64, len: usize },
    Random { seed: u64 },
}

pub fn pp_process(text: &str) -> Result<PpProcess, String> {
    let d = Descriptor::parse(text)?;
    let spec = match d.kind.as_str() {
        "poisson" => PpProcess::Poisson,
        "mixed" => PpProcess::Mixed {
            alpha: d.f64_or("alpha", 2.0)?,
            len: d.u64_or("len", 8)? as usize,
        },
        "random" => PpProcess::Random {
            seed: d.u64_or("seed", 7)?,
        },
        other => return Err(format!("unknown point-process law `{other}`")),
    };
    d.finish()?;
    Ok(spec)
}

pub fn mc_process(text: &str) -> Result<ProcessSpec, String> {
    let d = Descriptor::parse(text)?;
    let spec = match d.kind.as_str() {
        "poisson" => ProcessSpec::Poisson {
            rate: d.f64("rate")?,
        },
        "mixed" => ProcessSpec::Mixed {
            weights: mixed_weights(d.f64_or("alpha", 2.0)?, d.u64_or("len", 25)? as usize),
            rate: d.f64_or("rate", 1.0)?,
        },
        "interaction" => ProcessSpec::Interaction {
            potential: PairPotential {
                bin_width: d.f64_or("bin", 0.1)?,
                values: d.f64_list("phi")?,
            },
            rate: d.f64("rate")?,
        },
        other => return Err(format!("unknown Monte Carlo process `{other}`")),
    };
    d.finish()?;
    Ok(spec)
}

pub fn mc_thinning(text: &str) -> Result<McThinning, String> {
    let d = Descriptor::parse(text)?;
    let spec = match d.kind.as_str() {
        "independent" => McThinning::independent(d.f64("q")?).map_err(|e| e.to_string())?,
        "binom-inverse" | "binom_inverse" => McThinning::binom_inverse(),
        "piecewise" => {
            let qs = d.f64_list("qs")?;
            if qs.len() != 4 {
                return Err("piecewise thinning needs qs=q0;q1;q2;q3".into());
            }
            McThinning::piecewise([qs[0], qs[1], qs[2], qs[3]]).map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown Monte Carlo thinning `{other}`")),
    };
    d.finish()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dist_descriptors() {
        assert!(matches!(
            dist_spec("poisson:lambda=2").unwrap(),
            DistSpec::Poisson { lambda } if lambda == 2.0
        ));
        assert!(matches!(
            dist_spec("binomial:r=5,p=0.4").unwrap(),
            DistSpec::Binomial { r: 5, .. }
        ));
        let custom = dist_spec("custom:weights=0.5;0.25;0.125").unwrap();
        assert!(matches!(custom, DistSpec::Custom { ref weights } if weights.len() == 3));
    }

    #[test]
    fn rejects_unknown_keys_and_kinds() {
        assert!(dist_spec("poisson:lambda=2,typo=1").is_err());
        assert!(dist_spec("gamma:shape=2").is_err());
        assert!(thin_spec("independent").is_err());
        assert!(thin_spec("independent:q=0.5,x=2").is_err());
    }

    #[test]
    fn parses_thinning_descriptors() {
        assert!(matches!(thin_spec("uniform").unwrap(), ThinSpec::Uniform));
        assert!(matches!(
            thin_spec("all_or_nothing:q=0.3").unwrap(),
            ThinSpec::AllOrNothing { .. }
        ));
        assert!(mc_thinning("piecewise:qs=0.2;0.4;0.6;0.8").is_ok());
        assert!(mc_thinning("piecewise:qs=0.2;0.4").is_err());
    }
}
