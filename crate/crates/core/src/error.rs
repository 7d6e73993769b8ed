use thiserror::Error;

use crate::game::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("game failed validation: {}", summarize(.0))]
    InvalidGame(Vec<Violation>),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("attack budget {0} outside [0, 1]")]
    InvalidBudget(f64),

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("invalid learning schedule: {0}")]
    InvalidSchedule(String),

    #[error("linear system (I - gamma P) is singular or ill-conditioned")]
    SingularSystem,

    #[error("cannot project an empty vector onto the simplex")]
    EmptyVector,

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("KL divergence undefined: p has mass {mass} at index {index} where q is zero")]
    KlUndefined { index: usize, mass: f64 },

    #[error("initial distribution has zero mass at state {0}; mismatch coefficient is unbounded")]
    ZeroInitialMass(usize),

    #[error("enumeration too large: {0} candidates (limit {1})")]
    EnumerationTooLarge(u128, u128),

    #[error("unknown method tag `{0}`")]
    UnknownMethod(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn summarize(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
