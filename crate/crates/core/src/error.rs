use thiserror::Error;

/// Errors surfaced by the numerical kernel and the subset-search estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A linear system (or weighted design) is rank deficient to working
    /// precision; callers that sample point subsets are expected to resample.
    #[error("singular linear system")]
    Singular,

    /// An input violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Every candidate subset was skipped as degenerate, so no fit exists.
    #[error("all {0} candidate subsets were degenerate")]
    DegenerateData(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
