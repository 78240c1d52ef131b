use thiserror::Error;

use crate::search::StageStats;

pub type Result<T> = std::result::Result<T, HypError>;

#[derive(Debug, Clone, Error)]
pub enum HypError {
    /// An input violated a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// No representation of the inputs allows a stable evaluation.
    #[error("numeric range exceeded: {0}")]
    NumericRange(String),

    /// An angle or direction is undefined because two points coincide.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid ideal point: {0}")]
    InvalidIdealPoint(String),

    #[error("empty point set")]
    EmptySet,

    /// Every radius of the schedule was tried without producing a large enough fiber.
    #[error("schedule exhausted: largest fiber had {largest_fiber} members")]
    ScheduleExhausted {
        largest_fiber: usize,
        trace: Vec<StageStats>,
    },
}

pub(crate) fn precondition(msg: impl Into<String>) -> HypError {
    HypError::Precondition(msg.into())
}
