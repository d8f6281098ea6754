use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("radius {r} exceeds 1/2; ball volume is not exact on the unit torus")]
    RadiusTooLarge { r: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("coverage in dimension {d} needs at least one probe point")]
    NoProbes { d: usize },

    #[error(
        "rejection sampler exhausted {attempts} attempts for k={k}; \
         use the Markov chain backend at this density"
    )]
    RejectionExhausted { k: usize, attempts: u64 },

    #[error(
        "telescoping factor for k={k} estimated as {value}; increase replicas at this density"
    )]
    NonPositiveFactor { k: usize, value: f64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("enumeration budget exceeded: {what} = {size} > {limit}")]
    BudgetExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("event E_{k} is empty (no configurations of size {k})")]
    EmptyEvent { k: usize },

    #[error("estimate is inapplicable: k*p = {kp} >= 1")]
    Inapplicable { kp: f64 },

    #[error("2d = {two_d} does not divide n = {n}; H_{{d,n}} does not exist")]
    NoExtremalGraph { two_d: usize, n: usize },

    #[error("birthday bound not falsified by parity bound at this degree (d={d})")]
    NoCrossing { d: usize },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
