use thiserror::Error;

/// Errors produced by the computations in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: u32, found: u32 },

    #[error("dimension {dim} exceeds the limit of {limit} for {what}")]
    DimensionTooLarge {
        what: &'static str,
        dim: u32,
        limit: u32,
    },

    #[error("table for dimension {dim} must have {expected} entries, found {found}")]
    TableLength {
        dim: u32,
        expected: usize,
        found: usize,
    },

    #[error("table entry {index} is not finite")]
    NonFinite { index: usize },

    #[error("exact computation needs 2^{cost_log2} work, over the budget of 2^{budget_log2}; use --mode mc")]
    BudgetExceeded { cost_log2: u32, budget_log2: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("table entry {index} = {value} is outside the allowed range {allowed}")]
    ValueOutOfRange {
        index: usize,
        value: f64,
        allowed: &'static str,
    },

    #[error("domain {0} is empty")]
    EmptyDomain(String),

    #[error("rejection sampler made {proposals} proposals without an acceptance ({what})")]
    SamplerStall { what: String, proposals: u64 },

    #[error("malformed table file: {0}")]
    Parse(String),

    /// The instance does not meet the regime an asserted bound needs.
    #[error("regime not met: {message}")]
    RegimeNotMet { message: String, profile: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: u32, found: u32) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
