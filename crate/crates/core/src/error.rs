use thiserror::Error;

/// Errors produced by the statistical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample is empty")]
    EmptySample,

    #[error("need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// The method-of-moments dispersion estimate does not exist because the
    /// sample variance does not exceed the sample mean.
    #[error("dispersion not estimable: sample variance {variance} <= sample mean {mean}")]
    DispersionInestimable { mean: f64, variance: f64 },

    /// Every observation in every sample is zero, so the support bounds
    /// collapse to a single point and the tail bound is vacuous.
    #[error("degenerate support: all observations are zero")]
    DegenerateSupport,

    #[error("degenerate statistics: {0}")]
    DegenerateStatistics(String),

    #[error("confidence levels differ: {0} vs {1}")]
    MismatchedLevels(f64, f64),

    #[error("method `{0}` is not supported here")]
    UnsupportedMethod(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),
}

pub type Result<T> = std::result::Result<T, Error>;
