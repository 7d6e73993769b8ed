//! JSON wire format for games and policies.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array3, Array4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{MarkovGame, Policy, RewardRescale};

/// On-disk game document. `reward[s][a_v][a_a]`,
/// `transition[s][a_v][a_a][s']`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameDocument {
    pub n_states: usize,
    pub n_actions_victim: usize,
    pub n_actions_attacker: usize,
    pub gamma: f64,
    pub rho: Vec<f64>,
    pub reward: Vec<Vec<Vec<f64>>>,
    pub transition: Vec<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward_rescale: Option<RewardRescale>,
}

fn shape_err(what: &str) -> Error {
    Error::Dimension(format!("{what} does not match the declared sizes"))
}

impl GameDocument {
    /// Converts to a game. Only shapes are enforced here; invariant
    /// violations are recorded on the game and reported by validation.
    pub fn into_game(self) -> Result<MarkovGame> {
        let (ns, na, nb) = (self.n_states, self.n_actions_victim, self.n_actions_attacker);
        if self.rho.len() != ns {
            return Err(shape_err("rho"));
        }
        let mut r = Vec::with_capacity(ns * na * nb);
        if self.reward.len() != ns {
            return Err(shape_err("reward"));
        }
        for rs in &self.reward {
            if rs.len() != na {
                return Err(shape_err("reward"));
            }
            for ra in rs {
                if ra.len() != nb {
                    return Err(shape_err("reward"));
                }
                r.extend_from_slice(ra);
            }
        }
        let mut p = Vec::with_capacity(ns * na * nb * ns);
        if self.transition.len() != ns {
            return Err(shape_err("transition"));
        }
        for ps in &self.transition {
            if ps.len() != na {
                return Err(shape_err("transition"));
            }
            for pa in ps {
                if pa.len() != nb {
                    return Err(shape_err("transition"));
                }
                for pb in pa {
                    if pb.len() != ns {
                        return Err(shape_err("transition"));
                    }
                    p.extend_from_slice(pb);
                }
            }
        }
        let reward = Array3::from_shape_vec((ns, na, nb), r).map_err(|e| Error::Dimension(e.to_string()))?;
        let transition =
            Array4::from_shape_vec((ns, na, nb, ns), p).map_err(|e| Error::Dimension(e.to_string()))?;
        let g = MarkovGame::from_arrays(transition, reward, Array1::from(self.rho), self.gamma)?;
        Ok(match self.reward_rescale {
            Some(rs) => g.with_rescale(rs),
            None => g,
        })
    }
}

impl From<&MarkovGame> for GameDocument {
    fn from(g: &MarkovGame) -> Self {
        let (ns, na, nb) = g.reward().dim();
        GameDocument {
            n_states: ns,
            n_actions_victim: na,
            n_actions_attacker: nb,
            gamma: g.gamma(),
            rho: g.rho().to_vec(),
            reward: (0..ns)
                .map(|s| (0..na).map(|a| (0..nb).map(|b| g.reward()[[s, a, b]]).collect()).collect())
                .collect(),
            transition: (0..ns)
                .map(|s| {
                    (0..na)
                        .map(|a| (0..nb).map(|b| (0..ns).map(|t| g.transition()[[s, a, b, t]]).collect()).collect())
                        .collect()
                })
                .collect(),
            reward_rescale: g.rescale(),
        }
    }
}

impl MarkovGame {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GameDocument::from(self)).expect("game documents always serialize")
    }

    /// Parses a game document without enforcing invariants; see
    /// [`crate::game::validate_game`].
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<GameDocument>(text)?.into_game()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

impl Policy {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("policies always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}
