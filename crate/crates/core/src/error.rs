use thiserror::Error;

/// Which resource guard refused an operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetKind {
    Nodes,
    Memory,
    Samples,
}

impl std::fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BudgetKind::Nodes => "node budget",
            BudgetKind::Memory => "memory budget",
            BudgetKind::Samples => "sample budget",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid equation: {}", .0.join("; "))]
    InvalidEquation(Vec<String>),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{kind} exceeded: need {required}, limit {limit}")]
    BudgetExceeded {
        kind: BudgetKind,
        required: u128,
        limit: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("coefficient index {index} beyond truncation order {order}")]
    BeyondTruncation { index: u64, order: usize },

    #[error("quadrature rounding check failed: value {re}+{im}i with {samples} samples")]
    Rounding { re: f64, im: f64, samples: u64 },

    #[error("not enough usable points for a fit: have {have}, need {need}")]
    InsufficientPoints { have: usize, need: usize },

    #[error("gamma function undefined at {0}")]
    GammaDomain(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
