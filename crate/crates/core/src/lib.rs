//! Majority search with group queries.
//!
//! `n` balls are each red or blue. A query names `k` balls and learns
//! whether they all share a color; in the Pairing model a "no" also shows
//! two balls of different colors. The questioner must name a ball of the
//! strict majority color, or report that the colors are tied.

pub mod adversaries;
pub mod error;
pub mod knowledge;
pub mod questioners;
pub mod session;
pub mod solver;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use knowledge::{ComponentSummary, KnowledgeSet, Matching, PairingGraph};
pub use session::{run, AnswerSource, Outcome, Questioner, QuestionerRun, Session, Tracking};
pub use solver::{solve, ExactSolver, GameValue, Solution, SolveOptions};
pub use types::{Answer, BallId, BallSet, Coloring, Model, Pair, Query, Step, Transcript, Verdict};
