use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("monomial {monomial} is not divisible by {divisor}")]
    NotDivisible { monomial: String, divisor: String },
    #[error("matrix is singular")]
    Singular,
    #[error("generator {0} does not have finite order within the search bound")]
    InfiniteOrder(usize),
    #[error("group order exceeds the limit of {0}")]
    GroupTooLarge(usize),
    #[error("arity mismatch: cochain has arity {expected}, given {got} arguments")]
    Arity { expected: usize, got: usize },
    #[error("argument type mismatch: {0}")]
    ArgumentType(String),
    #[error("section is not G-invariant: {0}")]
    NotInvariant(String),
    #[error("closed-form route unavailable: {0}")]
    RouteUnavailable(String),
    #[error("unsupported support: {0}")]
    UnsupportedSupport(String),
    #[error("action is not reduced: element {0} acts trivially")]
    NotReduced(usize),
    #[error("not a Poisson structure: {0}")]
    NotPoisson(String),
    #[error("degree bound too small: {0}")]
    DegreeTooSmall(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
