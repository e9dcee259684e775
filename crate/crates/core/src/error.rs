use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("could not parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
    #[error("{0} did not converge")]
    NoConvergence(String),
    #[error(
        "discretization error {estimate:e} for eigenvalue {index} exceeds tolerance {tolerance:e}"
    )]
    Discretization {
        index: usize,
        estimate: f64,
        tolerance: f64,
    },
    #[error("eigenvalue {index} is not positive ({value:e})")]
    NonPositiveEigenvalue { index: usize, value: f64 },
    #[error("requested {requested} products but the truncated grid holds only {available}")]
    GridExhausted { requested: u128, available: u128 },
    #[error("enumeration budget of {budget} products exhausted")]
    BudgetExhausted { budget: usize },
    #[error("Gram matrix has negative pivot {value:e} at index {index}")]
    NegativePivot { index: usize, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
