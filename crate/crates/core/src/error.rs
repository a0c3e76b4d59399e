use thiserror::Error;

/// Every failure the library can report.
///
/// [`Error::code`] gives a stable identifier for each case; the CLI prints it
/// on its own line before any prose.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("characteristic 2 is not supported (q must be odd)")]
    CharacteristicTwo,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size {size} exceeds the cap {cap}")]
    SizeExceeded { size: u128, cap: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("element index {index} is out of range for a field of order {q}")]
    ElementOutOfRange { index: u64, q: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element {0} is not a square")]
    NotASquare(u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("bad arity: {0}")]
    BadArity(String),
    #[error("a line needs two distinct points")]
    IdenticalPoints,
    #[error("{what} needs {needed} steps, budget is {budget}")]
    BudgetExceeded { what: String, needed: u128, budget: u64 },
    #[error("q = {q} has the wrong residue mod 4 for this construction")]
    BadResidue { q: u32 },
    #[error("dimension {0} must be even")]
    OddDimension(usize),
    #[error("dimension {d} is not allowed: {reason}")]
    BadDimension { d: usize, reason: String },
    #[error("input vectors are linearly dependent")]
    DependentInput,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("sphere has {available} points, {needed} requested")]
    SphereTooSmall { needed: usize, available: usize },
    #[error("duplicate point at row {0}")]
    DuplicatePoint(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::CharacteristicTwo => "CharacteristicTwo",
            Error::NotPrime(_) => "NotPrime",
            Error::SizeExceeded { .. } => "SizeExceeded",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::ElementOutOfRange { .. } => "ElementOutOfRange",
            Error::DivisionByZero => "DivisionByZero",
            Error::NotASquare(_) => "NotASquare",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::BadArity(_) => "BadArity",
            Error::IdenticalPoints => "IdenticalPoints",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::BadResidue { .. } => "BadResidue",
            Error::OddDimension(_) => "OddDimension",
            Error::BadDimension { .. } => "BadDimension",
            Error::DependentInput => "DependentInput",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::SphereTooSmall { .. } => "SphereTooSmall",
            Error::DuplicatePoint(_) => "DuplicatePoint",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
            Error::Internal(_) => "InternalError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Cap on the number of elementary steps an enumeration may take.
///
/// Sweeps fail with [`Error::BudgetExceeded`] instead of truncating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Budget {
    /// Point enumerations and pair sweeps.
    pub const DEFAULT: Budget = Budget(100_000_000);
    /// Triple sweeps (distinct spreads, occurrences).
    pub const TRIPLES: Budget = Budget(1_000_000_000);

    pub fn check(self, what: &str, needed: u128) -> Result<()> {
        if needed > self.0 as u128 {
            Err(Error::BudgetExceeded {
                what: what.to_string(),
                needed,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}
