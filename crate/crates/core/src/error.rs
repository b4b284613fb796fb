use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty measure")]
    EmptyMeasure,

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrand is not finite at atom location {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("need more terms: tail bound requires N = {required}, only {available} coefficients available")]
    NeedMoreTerms { required: usize, available: usize },

    #[error("need at least {needed} moments, got {available}")]
    InsufficientMoments { needed: usize, available: usize },

    #[error("not a positive sequence: partial sum {index} is {value}")]
    NotPositiveSequence { index: usize, value: f64 },

    #[error("weight not RKHS-admissible: {0}")]
    NotRkhsAdmissible(String),

    #[error("Shimorin kernel is not a Bergman kernel: the divergence condition fails")]
    NotBergmanKernel,

    #[error("integral diverges: terminal slope {slope} is not below the decay rate {rate}")]
    IntegralDiverges { slope: f64, rate: f64 },

    #[error("∫ r ω(r) dr = ∞")]
    InfiniteWeightMass,

    #[error("nonpositive weight sample {value} at r = {r}")]
    NonPositiveWeight { r: f64, value: f64 },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),
}
