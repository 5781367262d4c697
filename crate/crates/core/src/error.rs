use serde::Serialize;
use thiserror::Error;

use crate::progressions::ErdosProgression;
use crate::sets::SumsetCertificate;

pub type Result<T> = std::result::Result<T, Error>;

/// Best partial result carried out of an exhausted search.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Partial {
    Certificate(SumsetCertificate),
    Progression(ErdosProgression),
    Generators { generators: Vec<u64> },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} is outside the horizon {horizon}")]
    Horizon { index: u64, horizon: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("system has no explicit factor of step {step}")]
    MissingFactor { step: usize },
    #[error("point does not belong to a {0} system")]
    KindMismatch(&'static str),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{what}: budget of {budget} exhausted")]
    Exhausted {
        what: String,
        budget: u64,
        partial: Option<Box<Partial>>,
    },
    #[error("{count} subsets exceed the enumeration cap {cap}")]
    TooManySubsets { count: u128, cap: u64 },
    #[error("alpha = {0} is rational at working precision")]
    Rational(f64),
    #[error("incompatible lift: {0}")]
    IncompatibleLift(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn exhausted(what: impl Into<String>, budget: u64, partial: Option<Partial>) -> Self {
        Error::Exhausted {
            what: what.into(),
            budget,
            partial: partial.map(Box::new),
        }
    }

    pub fn is_exhaustion(&self) -> bool {
        matches!(self, Error::Exhausted { .. })
    }
}
