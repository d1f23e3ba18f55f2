use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A construction parameter or operand violates a precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("division by zero")]
    DivisionByZero,

    /// Elimination found no pivot; `rank` is the rank reached before failing.
    #[error("singular matrix (rank {rank})")]
    Singular { rank: usize },

    #[error("insufficient parties: need at least {needed}, got {got}")]
    InsufficientParties { needed: usize, got: usize },

    /// The linear system built from the read symbols does not pin down every
    /// secret coordinate.
    #[error("secret is not decodable: {0}")]
    Undecodable(String),

    /// Read symbols disagree with the code structure.
    #[error("corrupt input: {0}")]
    Corruption(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("threshold cannot decrease (current {current}, requested {requested})")]
    ThresholdLowering { current: usize, requested: usize },

    #[error("enumeration needs {required} encodings, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
