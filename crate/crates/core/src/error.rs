use thiserror::Error;

/// Errors raised by the analysis pipeline. Model validation failures are not
/// errors: they are collected in a [`crate::model::ValidationReport`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed model: {0}")]
    Model(String),
    #[error("valuation {value} outside the closure of the enabled interval of edge `{edge}`")]
    OutOfDomain { edge: String, value: String },
    #[error("precondition violated: {0}")]
    PreViolation(String),
    #[error("construction assumption broken: {0}")]
    AssumptionBroken(String),
    #[error("valuation {value} is not strictly inside interval {interval}")]
    OutOfInterval { interval: String, value: String },
    #[error("assignment puts all mass on one endpoint of {0}")]
    Degenerate(String),
    #[error("target state {0} is not a state of the system")]
    TargetUnknownState(String),
    #[error("scheduler has no entry for history key {0}")]
    MissingTableEntry(String),
    #[error("scheduler is not B-minimal: {0}")]
    NotBMinimal(String),
    #[error("model does not pass validation: {0}")]
    Invalid(String),
    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
