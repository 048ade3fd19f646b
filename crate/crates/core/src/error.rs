use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("truncation: coefficient {needed} requested but series known only below {order}")]
    Truncation { needed: i64, order: i64 },
    #[error("valuation error: {0}")]
    Valuation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("unstable pair (g, n) = ({g}, {n})")]
    Unstable { g: usize, n: usize },
    #[error("convention check failed: {0}")]
    Convention(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("truncation escalation exhausted: {0}")]
    EscalationExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
