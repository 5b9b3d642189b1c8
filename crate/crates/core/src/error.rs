use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid Seifert matrix: {0}")]
    InvalidSeifert(String),

    #[error("bilinear form is singular over F_{0}")]
    SingularForm(u64),

    #[error("bilinear form is not symmetric")]
    AsymmetricForm,

    #[error("enumeration budget exceeded: {count} items requested, cap is {cap}")]
    BudgetExceeded { count: String, cap: u64 },

    #[error("eigenvalue collision: lambda+ = lambda- = {lambda} mod {p} (m={m}, q={q})")]
    EigenvalueCollision { m: i64, q: u32, p: u64, lambda: u64 },

    #[error("{p} divides a = {a} with exponent {exponent}, exponent 1 required")]
    ExponentNotOne { p: u64, a: String, exponent: u32 },

    #[error("{p} does not divide a = {a} (m={m}, q={q}){hint}")]
    NotDivisible { p: u64, a: String, m: i64, q: u32, hint: String },

    #[error("prime collision: {0}")]
    PrimeCollision(String),

    #[error("search bound {bound} exhausted: found {found} of {wanted}")]
    BoundExhausted { bound: u64, found: usize, wanted: usize },

    #[error("basis label mismatch: {0}")]
    LabelMismatch(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("cannot parse {0}")]
    Parse(String),

    #[error("certificate verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 2,
            _ => 1,
        }
    }
}
