use thiserror::Error;

/// Failure classes map one-to-one onto process exit codes; see `Error::exit_code`.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's domain (negative time, empty
    /// selectable set, non-positive t0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration source (file or flags) is missing a field, has the
    /// wrong type, or violates a parameter invariant. Names the field.
    #[error("configuration error: {0}")]
    Config(String),

    /// A request exceeds the configured memory budget.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// An internal consistency check failed. Always a bug.
    #[error("internal invariant violation: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// 0 is success; 1 flags bad input, 2 a refused oversize request,
    /// 3 a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) => 1,
            Error::Capacity(_) => 2,
            Error::Invariant(_) => 3,
        }
    }
}
