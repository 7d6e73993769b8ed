//! Exact tabular engine for two-agent Markov games under ε-coupled
//! adversarial-policy attacks.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod game;
pub mod gradients;
pub mod linalg;
pub mod sampling;
pub mod training;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
