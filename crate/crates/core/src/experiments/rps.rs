//! Rock-paper-scissors as a single-state game.

use ndarray::{Array1, Array3, Array4};

use crate::game::{MarkovGame, RewardRescale};

/// Action labels. Row `i` beats column `i + 1 (mod 3)`.
pub const RPS_ACTIONS: [&str; 3] = ["rock", "scissors", "paper"];

/// Zero-sum payoff to the victim (row player).
pub const RPS_PAYOFF: [[f64; 3]; 3] = [[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]];

/// Rewards are mapped to `[0, 1]` by `r ↦ (r + 1) / 2`.
pub const RPS_RESCALE: RewardRescale = RewardRescale { scale: 0.5, offset: 0.5 };

/// Single-state, myopic (γ = 0) game with rescaled payoffs and the rescale
/// recorded so values can be reported in raw units.
pub fn builtin_rps() -> MarkovGame {
    let r = Array3::from_shape_fn((1, 3, 3), |(_, a, b)| {
        RPS_RESCALE.scale * RPS_PAYOFF[a][b] + RPS_RESCALE.offset
    });
    MarkovGame::new(Array4::ones((1, 3, 3, 1)), r, Array1::from(vec![1.0]), 0.0)
        .expect("the built-in game is valid")
        .with_rescale(RPS_RESCALE)
}
