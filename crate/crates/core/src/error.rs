use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different domains: {0}")]
    DomainMismatch(String),
    #[error("cannot factor the zero polynomial")]
    EmptyFactorization,
    #[error("valuation of the zero function is undefined")]
    UndefinedValuation,
    #[error("power residue symbol undefined: {0}")]
    SymbolUndefined(String),
    #[error("polynomial model is not integral: {0}")]
    NotIntegral(String),
    #[error("wild ramification: characteristic {p} divides {d}")]
    TamenessViolation { p: u32, d: u32 },
    #[error("bad reduction: {0}")]
    BadReduction(String),
    #[error("unsupported characteristic {0}")]
    UnsupportedCharacteristic(u32),
    #[error("L-function is not a polynomial of defined degree: {0}")]
    DegreeUndefined(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("functional equation violated: {0}")]
    FunctionalEquationViolation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no conforming sample found within budget: {0}")]
    SamplingExhausted(String),
    #[error("hypothesis inapplicable: {0}")]
    HypothesisInapplicable(String),
    #[error("inconsistent context: {0}")]
    ContextError(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
