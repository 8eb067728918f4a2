use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid field element: {0}")]
    InvalidElement(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("exceptional pair: g1* g1 = g2* g2")]
    ExceptionalPair,
    #[error("invalid band: {0}")]
    InvalidBand(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("budget exceeded: operation needs {needed} units, limit is {limit}")]
    BudgetExceeded { needed: u128, limit: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
