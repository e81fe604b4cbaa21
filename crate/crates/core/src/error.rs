use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("need at least 2 arms, got {0}")]
    TooFewArms(usize),

    #[error("mean of arm {arm} is {mean}, outside [0, 1]")]
    MeanOutOfRange { arm: usize, mean: f64 },

    #[error("no unique best arm")]
    NoUniqueBest,

    #[error("arm index {arm} out of range for {num_arms} arms")]
    ArmOutOfRange { arm: usize, num_arms: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("budget {budget} is smaller than the required minimum {required}")]
    BudgetTooSmall { budget: u64, required: u64 },

    #[error("schedule spends {spent} pulls but the budget is {budget}")]
    BudgetOverrun { spent: u64, budget: u64 },

    #[error("parameter {name} must be positive and finite, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("arm count mismatch: expected {expected}, got {actual}")]
    ArmCountMismatch { expected: usize, actual: usize },

    #[error("invalid gaps: {0}")]
    InvalidGaps(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("{0} is out of range")]
    OutOfRange(String),

    #[error("unknown setup or algorithm: {0}")]
    Unknown(String),

    #[error("exact enumeration needs {needed} states, limit is {limit}")]
    EnumerationLimit { needed: u64, limit: u64 },

    #[error("baseline frequency is zero; ratio undefined")]
    ZeroBaseline,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
