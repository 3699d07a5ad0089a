use thiserror::Error;

/// Why the simplex solver gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpFailure {
    Unbounded,
    /// The slack basis is infeasible because some right-hand side is negative.
    NegativeRhs,
    IterationLimit,
    Malformed,
}

impl std::fmt::Display for LpFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LpFailure::Unbounded => "is unbounded",
            LpFailure::NegativeRhs => "has a negative right-hand side",
            LpFailure::IterationLimit => "hit the pivot limit",
            LpFailure::Malformed => "is malformed",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate {index} = {value} lies outside [0, 1]")]
    Domain { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("algorithm asked for query {attempted} but the budget is {budget}")]
    BudgetExceeded { budget: usize, attempted: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear program {reason}: {instance}")]
    Lp { reason: LpFailure, instance: String },

    #[error("{routine} did not converge: {detail}")]
    NonConvergence {
        routine: &'static str,
        detail: String,
    },

    #[error("numerical result contradicts a proven bound: {0}")]
    Inconsistent(String),

    #[error("transcript json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
