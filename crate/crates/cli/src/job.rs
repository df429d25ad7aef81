use serde::{Deserialize, Serialize};

/// A job: the command name plus its parameter object. Parameters are
/// validated against the per-command schema before execution; unknown keys
/// are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawJob {
    pub command: String,
    #[serde(default = "empty_object")]
    pub params: serde_json::Value,
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(serde_json::Map::new())
}

impl RawJob {
    pub fn format(&self) -> String {
        self.params
            .get("format")
            .and_then(|v| v.as_str())
            .unwrap_or("json")
            .to_string()
    }
}

pub fn default_nmax() -> usize {
    80
}

pub fn default_pp_nmax() -> usize {
    4
}

pub fn default_sites() -> usize {
    2
}

pub fn default_dim() -> usize {
    2
}

pub fn default_samples() -> u64 {
    100_000
}

pub fn default_seed() -> u64 {
    1
}

pub fn default_format() -> String {
    "json".into()
}

/// Parameters of the counting-distribution commands
/// (`thin`, `condense`, `split`, `verify-balance`, `verify-ibp`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DistPairParams {
    pub dist: String,
    pub thinning: String,
    #[serde(default = "default_nmax")]
    pub nmax: usize,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_format")]
    pub format: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PapangelouParams {
    pub dist: String,
    pub thinning: String,
    #[serde(default = "default_nmax")]
    pub nmax: usize,
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_format")]
    pub format: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CycleParams {
    pub dist: String,
    pub thinning: String,
    #[serde(default = "default_nmax")]
    pub nmax: usize,
    #[serde(default)]
    pub ncap: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_format")]
    pub format: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ReconstructParams {
    pub thinning: String,
    pub condensation_from: String,
    #[serde(default = "default_nmax")]
    pub nmax: usize,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_format")]
    pub format: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PpExactParams {
    pub action: String,
    #[serde(default = "default_sites")]
    pub sites: usize,
    #[serde(default)]
    pub site_weights: Option<String>,
    #[serde(default = "default_pp_process")]
    pub process: String,
    #[serde(default = "default_pp_thinning")]
    pub pp_thinning: String,
    #[serde(default = "default_pp_nmax")]
    pub nmax: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_format")]
    pub format: String,
}

fn default_pp_process() -> String {
    "poisson".into()
}

fn default_pp_thinning() -> String {
    "independent:q=0.5".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PpMcParams {
    pub action: String,
    #[serde(default)]
    pub process: Option<String>,
    #[serde(default)]
    pub thinning: Option<String>,
    #[serde(default)]
    pub rate: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub g: Option<String>,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_format")]
    pub format: String,
}
