use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the CLI and the C ABI to pick exit/status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input (bad files, mismatched arities, ...).
    Validation,
    /// An enumeration cap or guard was hit; the question may still be well-posed.
    Guard,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("incompatible tuples: arity {left} vs {right}")]
    IncompatibleTuples { left: usize, right: usize },

    #[error("domain mismatch: |D| = {left} vs |D| = {right}")]
    DomainMismatch { left: u32, right: u32 },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("value {value} out of range for a domain of size {size}")]
    OutOfRange { value: u32, size: u32 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid total order: {0}")]
    InvalidOrder(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("{what}: {size} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("budget exceeded: {rows}^{arity} row sequences exceeds {cap}")]
    BudgetExceeded { rows: usize, arity: usize, cap: u128 },

    #[error("instance too large for enumeration: |D|^n = {size} exceeds {cap}")]
    TooLargeForEnumeration { size: u128, cap: u128 },

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0} is not a solution")]
    NotASolution(&'static str),

    #[error("no \u{2227},=-reduction exists for {0}")]
    NotExpressible(String),

    #[error("no method applies: {0}")]
    NoMethod(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::CapExceeded { .. }
            | Error::BudgetExceeded { .. }
            | Error::TooLargeForEnumeration { .. }
            | Error::GuardExceeded(_)
            | Error::NoMethod(_) => ErrorKind::Guard,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
