use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{m} exceeds 2^16")]
    OrderOverflow { p: u32, m: u32 },
    #[error("operands belong to different fields (F_{left} vs F_{right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("entry {value} is not an element of F_{q}")]
    EntryOutOfRange { value: u32, q: u32 },
    #[error("value {value} out of range: {what}")]
    OutOfRange { what: &'static str, value: i64 },
    #[error("enumeration of {count} items exceeds the configured bound {bound}")]
    BoundExceeded { count: String, bound: u64 },
    #[error("{0}")]
    InvalidParameters(String),
    #[error("rank oracle is not a q-matroid: {0}")]
    NotAMatroid(String),
    #[error("family violates the flat axioms: {0}")]
    FlatAxioms(String),
    #[error("not a member of the flat family: {0}")]
    NotAMember(String),
    #[error("design verification failed: {0}")]
    Verification(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
