use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed system document: {0}")]
    Parse(String),

    #[error("mixed degrees: polynomial {index} has degree {found}, expected {expected}")]
    MixedDegrees {
        index: usize,
        found: u32,
        expected: u32,
    },

    #[error("polynomial {0} is identically zero")]
    ZeroPolynomial(usize),

    #[error("degree {0} is below 2")]
    DegreeTooLow(u32),

    #[error("top-degree part of polynomial {0} vanishes")]
    DegenerateTopPart(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("enumeration budget exceeded: need {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("gcd condition violated: gcd(a, q) = {0}")]
    GcdViolation(u64),

    #[error("hypothesis refused: {0}")]
    HypothesisRefused(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric verification failed: {0}")]
    Verification(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Fails with [`Error::BudgetExceeded`] when `needed` exceeds `budget`.
pub(crate) fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}
