use thiserror::Error;

/// Errors raised by views, algorithms, oracles and referees.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An algorithm parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A position above the view length was requested.
    #[error("position {index} is beyond the list length {len}")]
    OutOfRange { index: i64, len: u64 },

    /// The input violates an algorithm precondition (ordering, sign).
    #[error("input contract violated at position {index}: {reason}")]
    InputContract { index: u64, reason: String },

    /// A budgeted query channel refused a query.
    #[error("query budget of {budget} exhausted")]
    BudgetExceeded { budget: u64 },

    /// A region handed to a certificate checker does not end at n.
    #[error("malformed region certificate: {0}")]
    MalformedCertificate(String),

    /// A state the algorithms rule out was reached.
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
