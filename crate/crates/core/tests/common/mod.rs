//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use coupled_games::experiments::{generate_random_game, RandomGameSpec};
use coupled_games::game::{MarkovGame, Policy};
use coupled_games::sampling::{random_policy, seeded, SeededRng};
use ndarray::Array2;

pub fn rng(seed: u64) -> SeededRng {
    seeded(seed)
}

pub fn game(ns: usize, na: usize, nb: usize, gamma: f64, seed: u64) -> MarkovGame {
    let spec = RandomGameSpec {
        n_states: ns,
        n_actions_victim: na,
        n_actions_attacker: nb,
        dirichlet_concentration: 1.0,
        gamma,
    };
    generate_random_game(&spec, seed).unwrap()
}

pub fn policy(rng: &mut SeededRng, ns: usize, na: usize) -> Policy {
    random_policy(rng, ns, na, 1.0)
}

/// Dirichlet draw mixed with uniform so every entry is at least `floor / na`.
pub fn interior(rng: &mut SeededRng, ns: usize, na: usize, floor: f64) -> Policy {
    let p = random_policy(rng, ns, na, 1.0);
    let m = Array2::from_shape_fn((ns, na), |(s, a)| (1.0 - floor) * p.get(s, a) + floor / na as f64);
    Policy::new(m).unwrap()
}
