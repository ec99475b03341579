use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index {index} out of range (available: {available})")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("enumeration refused for i = {0} (limit 20)")]
    EnumerationTooLarge(usize),

    #[error("insufficient coefficients: need {needed}, have {have}")]
    InsufficientCoefficients { needed: usize, have: usize },

    #[error("coefficient e_{k} has {digits} decimal digits, above the cap of {cap}")]
    CoefficientCap { k: usize, digits: u64, cap: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eta sequence must decrease to 0: {0}")]
    EtaNotDecreasing(String),

    #[error("more precision needed: {0}")]
    NeedsMorePrecision(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("time {0} lies before the first modeled interval")]
    BeforeFirstInterval(String),

    #[error("index {k} lies beyond the generated schedule (kmax = {kmax})")]
    BeyondSchedule { k: usize, kmax: usize },

    #[error("invalid test curve {id}: {reason}")]
    InvalidCurve { id: String, reason: String },

    #[error("empty vector")]
    EmptyVector,

    #[error("index sets differ: {0} vs {1}")]
    IndexMismatch(usize, usize),

    #[error("1/0 has infinitely many neighbors; a numerator window is required")]
    UnboundedNeighbors,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
