use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("field mismatch: F_{0} vs F_{1}")]
    FieldMismatch(u32, u32),
    #[error("generator index {index} out of range 1..={rank}")]
    LetterOutOfRange { index: i32, rank: usize },
    #[error("order budget base {base} must exceed 2d-1 = {bound}")]
    DivergentBudget { base: u64, bound: u64 },
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("group of order {order} exceeds enumeration cap {cap}")]
    EnumerationCap { order: usize, cap: usize },
    #[error("element order exceeds cap {0}")]
    OrderOverflow(u64),
    #[error("generators do not generate the group (closure has {closure} of {order} elements)")]
    NotGenerating { closure: usize, order: usize },
    #[error("prime {p} divides the group order {order}")]
    PrimeDividesOrder { p: u32, order: usize },
    #[error("subspace is not stable under the group action")]
    NotStable,
    #[error("enumeration guard of {0} exceeded")]
    GuardExceeded(usize),
    #[error("delta = {0} is not positive")]
    NonPositiveDelta(String),
    #[error("delta = {delta} does not exceed 1 - epsilon = {bound}")]
    DeltaBelowBound { delta: String, bound: String },
    #[error("invalid table group: {0}")]
    InvalidTable(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("tower file: {0}")]
    Format(String),
    #[error("tower invariant failed on load: {0}")]
    Invariant(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
