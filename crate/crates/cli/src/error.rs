use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] finsum::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    VerificationFailed = 1,
    BudgetExhausted = 2,
    InputError = 3,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::VerificationFailed => "verification_failed",
            Status::BudgetExhausted => "budget_exhausted",
            Status::InputError => "input_error",
        }
    }
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Core(finsum::Error::Exhausted { .. } | finsum::Error::TooManySubsets { .. }) => Status::BudgetExhausted,
            _ => Status::InputError,
        }
    }

    pub fn partial(&self) -> Option<&finsum::Partial> {
        match self {
            CliError::Core(finsum::Error::Exhausted { partial, .. }) => partial.as_deref(),
            _ => None,
        }
    }
}
