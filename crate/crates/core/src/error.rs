use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid module {module}: {reason}")]
    InvalidModule { module: String, reason: String },

    #[error("element does not conform to group spec: {0}")]
    SpecMismatch(String),

    #[error("index {index} out of range for group of size {size}")]
    IndexOutOfRange { index: u64, size: u64 },

    #[error("divisor {r} outside 1..={h}")]
    DivisorOutOfRange { r: i64, h: u32 },

    #[error("CRT requires pairwise-coprime cyclic modules: {0}")]
    NotCoprime(String),

    #[error("group of size {size} exceeds the enumeration cap {cap}")]
    CapExceeded { size: String, cap: u64 },

    #[error("{what}: {count} items exceed the enumeration budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        count: BigUint,
        budget: u64,
    },

    #[error("{0} requires a nonempty set")]
    EmptySet(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Cap and budget violations, as opposed to malformed input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. } | Error::BudgetExceeded { .. }
        )
    }
}
