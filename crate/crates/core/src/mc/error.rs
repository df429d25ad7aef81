use thiserror::Error;

/// Errors from the Monte Carlo harness.
#[derive(Debug, Error)]
pub enum McError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration of {size} points exceeds the subset cap {cap}")]
    SubsetCapExceeded { size: usize, cap: usize },

    #[error("thinning weights vanish on every subset of a {size}-point configuration")]
    AllZeroWeights { size: usize },

    #[error("rejection sampler acceptance rate fell below {floor:e} ({attempts} attempts)")]
    LowAcceptance { attempts: u64, floor: f64 },

    #[error("count weights violate the hole rule at index {index}")]
    CountWeightHole { index: usize },

    #[error("no closed-form add-one kernel for ({process}, {thinning})")]
    UnsupportedCombination {
        process: &'static str,
        thinning: &'static str,
    },
}
