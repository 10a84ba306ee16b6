use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {value} outside the domain [0, {cap}]")]
    Domain { value: f64, cap: f64 },

    #[error("the Legendre transform of the linear Young function is not finite")]
    LinearCase,

    #[error("invalid Young function: {0}")]
    InvalidYoung(String),

    #[error("invalid entire function: {0}")]
    InvalidSpec(String),

    #[error("derivative order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("contour passes through a zero (after {retries} jittered retries)")]
    ContourThroughZero { retries: usize },

    #[error("no zeros in the disk of radius {radius}")]
    NoZeros { radius: f64 },

    #[error("zero at {alpha} has multiplicity {mult}, above the cap {cap}")]
    MultiplicityTooLarge { alpha: String, mult: usize, cap: usize },

    #[error("invalid multiplicity variety: {0}")]
    InvalidVariety(String),

    #[error("empty multiplicity variety")]
    EmptyVariety,

    #[error("derivative of order {order} vanishes at zero #{k} (|value| = {value:e})")]
    DerivativeVanishes { k: usize, order: usize, value: f64 },

    #[error("coincident nodes: |Pi_(k-1)(alpha_k)| underflows at k = {k}")]
    CoincidentNodes { k: usize },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("deflation residual {residual:e} at zero #{k} exceeds tolerance")]
    DeflationResidual { k: usize, residual: f64 },

    #[error("series pairing diverges (term ratio {ratio:.3} after {terms} terms)")]
    Divergent { ratio: f64, terms: usize },
}
