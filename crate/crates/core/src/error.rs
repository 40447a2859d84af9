use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ball {ball} out of range for n = {n}")]
    BallOutOfRange { ball: usize, n: usize },

    #[error("n = {n} exceeds the supported maximum of {max}")]
    TooManyBalls { n: usize, max: usize },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("invalid answer: {0}")]
    InvalidAnswer(String),

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("answers are inconsistent with every coloring")]
    Inconsistent,

    #[error("constraint system is unsatisfiable")]
    Unsatisfiable,

    #[error("knowledge set is empty")]
    EmptyKnowledge,

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("questioner exceeded the ceiling of {ceiling} queries")]
    CeilingExceeded { ceiling: usize },

    #[error("solver state budget of {0} exceeded")]
    BudgetExceeded(usize),

    #[error("questioner ended without a verdict")]
    NoVerdict,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
