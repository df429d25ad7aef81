use thiserror::Error;

/// Errors from the finite point-process calculus.
#[derive(Debug, Error)]
pub enum PpError {
    #[error("site count mismatch: {left} vs {right}")]
    SiteCountMismatch { left: usize, right: usize },

    #[error("ground space needs at least one site")]
    EmptySpace,

    #[error("site {index} has non-positive weight {value}")]
    BadSiteWeight { index: usize, value: f64 },

    #[error("configuration with {size} points exceeds the desk-scale cap {cap}")]
    ConfigTooLarge { size: usize, cap: usize },

    #[error("{count} configurations exceed the enumeration cap {cap}")]
    ConfigSpaceTooLarge { count: u128, cap: u128 },

    #[error("negative or non-finite weight on configuration {config}")]
    BadWeight { config: String },

    #[error("thinning assigns zero weight to every subconfiguration of {config}")]
    DegenerateThinning { config: String },

    #[error("no factorial-moment mass at configuration {config}")]
    NoMass { config: String },

    #[error("measure has zero total mass")]
    ZeroMass,

    #[error("layer {layer} is empty but mass reappears at layer {offender}")]
    HoleInLayers { layer: usize, offender: usize },

    #[error("integration-by-parts hypothesis fails at {config}: {what}")]
    Hypothesis { config: String, what: &'static str },

    #[error("kernel table has no row for {config}")]
    MissingRow { config: String },

    #[error("zero {what} at configuration {config} blocks the layer recursion")]
    ZeroDenominator { config: String, what: &'static str },

    #[error("kernel cycle condition violated by {violation:e} at ({kappa}, {mu}, {lambda}, {nu})")]
    CycleViolation {
        kappa: String,
        mu: String,
        lambda: String,
        nu: String,
        violation: f64,
    },

    #[error("count weights violate the hole rule at index {index}")]
    CountWeightHole { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
