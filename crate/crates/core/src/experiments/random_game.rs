//! Seeded random games for the desk-scale studies.

use ndarray::{Array1, Array3, Array4};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{MarkovGame, Policy, MAX_DISCOUNT};
use crate::sampling::{child_seed, dirichlet, random_policy, seeded};

const GAME_STREAM: u64 = 1;
const BENIGN_STREAM: u64 = 2;

/// Transition rows ~ Dirichlet(concentration), rewards ~ U[0, 1], ρ uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomGameSpec {
    pub n_states: usize,
    pub n_actions_victim: usize,
    pub n_actions_attacker: usize,
    pub dirichlet_concentration: f64,
    pub gamma: f64,
}

impl Default for RandomGameSpec {
    fn default() -> Self {
        RandomGameSpec {
            n_states: 3,
            n_actions_victim: 3,
            n_actions_attacker: 3,
            dirichlet_concentration: 1.0,
            gamma: 0.9,
        }
    }
}

impl RandomGameSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_states == 0 || self.n_actions_victim == 0 || self.n_actions_attacker == 0 {
            return Err(Error::Config("random game sizes must be positive".into()));
        }
        if !(self.dirichlet_concentration > 0.0 && self.dirichlet_concentration.is_finite()) {
            return Err(Error::Config(format!(
                "dirichlet_concentration {} must be positive",
                self.dirichlet_concentration
            )));
        }
        if !(0.0..=MAX_DISCOUNT).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma {} outside [0, {MAX_DISCOUNT}]", self.gamma)));
        }
        Ok(())
    }
}

pub fn generate_random_game(spec: &RandomGameSpec, seed: u64) -> Result<MarkovGame> {
    spec.validate()?;
    let (ns, na, nb) = (spec.n_states, spec.n_actions_victim, spec.n_actions_attacker);
    let mut rng = seeded(child_seed(seed, GAME_STREAM, 0));
    let mut p = Array4::zeros((ns, na, nb, ns));
    for s in 0..ns {
        for a in 0..na {
            for b in 0..nb {
                for (t, x) in dirichlet(&mut rng, ns, spec.dirichlet_concentration).into_iter().enumerate() {
                    p[[s, a, b, t]] = x;
                }
            }
        }
    }
    let r = Array3::from_shape_fn((ns, na, nb), |_| rng.random::<f64>());
    let rho = Array1::from_elem(ns, 1.0 / ns as f64);
    MarkovGame::new(p, r, rho, spec.gamma)
}

/// Benign attacker policy paired with `generate_random_game(spec, seed)`,
/// drawn from an independent stream.
pub fn random_benign_policy(spec: &RandomGameSpec, seed: u64) -> Policy {
    let mut rng = seeded(child_seed(seed, BENIGN_STREAM, 0));
    random_policy(&mut rng, spec.n_states, spec.n_actions_attacker, 1.0)
}
