use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("invalid argument: {0}")]
    Domain(&'static str),

    /// An exact enumeration would exceed its step budget.
    #[error("enumeration needs {required} steps but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("input sequence is empty")]
    EmptyInput,
}
