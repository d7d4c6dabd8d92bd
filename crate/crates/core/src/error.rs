use thiserror::Error;

/// Errors raised by the library. Every fallible operation returns this type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("negative value: {0}")]
    Negative(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("malformed continued fraction: {0}")]
    MalformedCf(String),
    #[error("zero has no {0}")]
    ZeroValue(&'static str),
    #[error("precision must be at least 16 bits, got {0}")]
    Precision(u32),
    #[error("tree parameters must be positive, got u={u}, v={v}")]
    InvalidParams { u: u64, v: u64 },
    #[error("cannot parse tree path {0:?}")]
    ParsePath(String),
    #[error("{query} is not a descendant of {ancestor}")]
    NotDescendant { ancestor: String, query: String },
    #[error("{value} is not in row {depth} of the tree rooted at {root}")]
    NotInRow {
        value: String,
        root: String,
        depth: u64,
    },
    #[error("continued fractions have different integer parts")]
    DifferentIntegerParts,
    #[error("continued fractions have equal values")]
    EqualValues,
    #[error("{0} is not an orphan root")]
    NotOrphan(String),
    #[error("exact sum exceeded the digit budget of {budget} decimal digits")]
    DigitBudget { budget: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
