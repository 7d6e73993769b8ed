//! Best-response oracles, exploitability, and the training dynamics.

mod algorithms;
mod best_response;
pub mod mdp;
mod ne;
mod schedule;
mod trace;

pub use algorithms::{
    baseline_dynamics, run, train_min_oracle, train_two_timescale, train_two_timescale_with, Init, Method,
    RunOptions,
};
pub use best_response::{best_response_attacker, best_response_victim, exploitability, DEFAULT_TOLERANCE};
pub(crate) use best_response::Coupling;
pub use ne::{random_challengers, verify_ne_robustness, NeReport};
pub use schedule::{Decay, LearningSchedule};
pub use trace::{IterationRecord, SelectionRule, TrainingTrace, TRACE_HEADER, TRACE_RAW_COLUMNS};
