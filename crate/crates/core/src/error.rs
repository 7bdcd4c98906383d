use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("parameter regime violated: {0}")]
    Regime(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("degree {degree} must be below the field size {p}")]
    DegreeTooLarge { p: u64, degree: u64 },

    #[error("family of {size} sets exceeds the cap of {cap}")]
    FamilyTooLarge { size: u128, cap: u128 },

    #[error("dimension {n} exceeds the enumeration limit {limit}")]
    DimensionTooLarge { n: usize, limit: usize },

    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("epsilon {0} outside the supported range")]
    EpsilonOutOfRange(String),

    #[error("malformed certificate: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by running out of a configured resource budget.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded(_)
                | Error::FamilyTooLarge { .. }
                | Error::DimensionTooLarge { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
