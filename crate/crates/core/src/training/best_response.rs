//! Best-response and exploitability oracles.
//!
//! The coupling is folded into the game once; fixing one agent then leaves a
//! single-agent MDP for the other, solved by [`TabularMdp::solve`].

use ndarray::{Array2, Array3, ArrayView2};

use crate::error::{Error, Result};
use crate::game::{check_budget, fold_coupling, MarkovGame, Policy};
use crate::training::mdp::{Sense, TabularMdp};

/// Default accuracy for best-response values.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

pub(crate) fn check_tolerance(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

/// A game with its coupling folded in. The attacker's coordinate is the
/// adversarial component.
#[derive(Debug, Clone)]
pub(crate) struct Coupling {
    pub game: MarkovGame,
    pub folded: MarkovGame,
    pub benign: Policy,
    pub eps: f64,
}

impl Coupling {
    pub fn new(g: &MarkovGame, benign: &Policy, eps: f64) -> Result<Self> {
        check_budget(eps)?;
        Ok(Coupling { game: g.clone(), folded: fold_coupling(g, benign, eps)?, benign: benign.clone(), eps })
    }

    /// Attacker MDP with the victim marginalised out.
    fn attacker_mdp(&self, victim: ArrayView2<f64>) -> TabularMdp {
        let g = &self.folded;
        let (ns, na, nb) = g.reward().dim();
        let mut reward = Array2::zeros((ns, nb));
        let mut transition = Array3::zeros((ns, nb, ns));
        for s in 0..ns {
            for a in 0..na {
                let w = victim[[s, a]];
                if w == 0.0 {
                    continue;
                }
                for b in 0..nb {
                    reward[[s, b]] += w * g.reward()[[s, a, b]];
                    for t in 0..ns {
                        transition[[s, b, t]] += w * g.transition()[[s, a, b, t]];
                    }
                }
            }
        }
        TabularMdp { reward, transition, gamma: g.gamma() }
    }

    /// Victim MDP with the adversarial component marginalised out.
    fn victim_mdp(&self, adversarial: ArrayView2<f64>) -> TabularMdp {
        let g = &self.folded;
        let (ns, na, nb) = g.reward().dim();
        let mut reward = Array2::zeros((ns, na));
        let mut transition = Array3::zeros((ns, na, ns));
        for s in 0..ns {
            for b in 0..nb {
                let w = adversarial[[s, b]];
                if w == 0.0 {
                    continue;
                }
                for a in 0..na {
                    reward[[s, a]] += w * g.reward()[[s, a, b]];
                    for t in 0..ns {
                        transition[[s, a, t]] += w * g.transition()[[s, a, b, t]];
                    }
                }
            }
        }
        TabularMdp { reward, transition, gamma: g.gamma() }
    }

    pub fn attacker_best_response(&self, victim: &Policy, tol: f64) -> Result<(Policy, f64)> {
        let g = &self.folded;
        if self.eps == 0.0 {
            let u = Policy::uniform(g.n_states(), g.n_actions_attacker());
            let v = crate::game::value(&self.game, victim, &self.benign)?;
            return Ok((u, v));
        }
        let sol = self.attacker_mdp(victim.view()).solve(Sense::Minimize, tol)?;
        let pol = Policy::deterministic(&sol.actions, g.n_actions_attacker())?;
        Ok((pol, g.rho().dot(&sol.values)))
    }

    pub fn victim_best_response(&self, adversarial: &Policy, tol: f64) -> Result<(Policy, f64)> {
        let g = &self.folded;
        let sol = self.victim_mdp(adversarial.view()).solve(Sense::Maximize, tol)?;
        let pol = Policy::deterministic(&sol.actions, g.n_actions_victim())?;
        Ok((pol, g.rho().dot(&sol.values)))
    }
}

/// Adversarial component minimising the victim's value, and that value.
/// With a zero budget every policy is optimal and the uniform policy is
/// returned.
pub fn best_response_attacker(
    g: &MarkovGame,
    victim: &Policy,
    benign: &Policy,
    eps: f64,
    tol: f64,
) -> Result<(Policy, f64)> {
    check_tolerance(tol)?;
    g.ensure_valid()?;
    g.check_victim(victim)?;
    Coupling::new(g, benign, eps)?.attacker_best_response(victim, tol)
}

/// Victim policy maximising its value against a fixed adversarial
/// component, and that value.
pub fn best_response_victim(
    g: &MarkovGame,
    benign: &Policy,
    eps: f64,
    adversarial: &Policy,
    tol: f64,
) -> Result<(Policy, f64)> {
    check_tolerance(tol)?;
    g.ensure_valid()?;
    g.check_attacker(adversarial)?;
    Coupling::new(g, benign, eps)?.victim_best_response(adversarial, tol)
}

/// `Expl(ν) = -min_α V_ρ(ν, (1-ε) benign + ε α)`.
pub fn exploitability(g: &MarkovGame, victim: &Policy, benign: &Policy, eps: f64, tol: f64) -> Result<f64> {
    Ok(-best_response_attacker(g, victim, benign, eps, tol)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{value, CoupledPolicy};
    use crate::testutil;
    use ndarray::{Array1, Array4};

    fn rps() -> MarkovGame {
        // rows beat the next column: Rock, Scissors, Paper
        let raw = [[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]];
        let r = Array3::from_shape_fn((1, 3, 3), |(_, a, b)| (raw[a][b] + 1.0) / 2.0);
        MarkovGame::new(Array4::ones((1, 3, 3, 1)), r, Array1::from(vec![1.0]), 0.0).unwrap()
    }

    #[test]
    fn counter_to_pure_rock() {
        let g = rps();
        let rock = Policy::deterministic(&[0], 3).unwrap();
        let (br, v) = best_response_attacker(&g, &rock, &Policy::uniform(1, 3), 1.0, 1e-8).unwrap();
        // enumerate the three pure responses
        let vals: Vec<f64> = (0..3)
            .map(|b| value(&g, &rock, &Policy::deterministic(&[b], 3).unwrap()).unwrap())
            .collect();
        assert_eq!(vals, vec![0.5, 1.0, 0.0]);
        assert_eq!(br.as_deterministic(), Some(vec![2]));
        assert_eq!(v, 0.0);
    }

    #[test]
    fn uniform_victim_exploitability() {
        let g = rps();
        let e = exploitability(&g, &Policy::uniform(1, 3), &Policy::uniform(1, 3), 1.0, 1e-8).unwrap();
        assert!((e + 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_budget_convention() {
        let mut rng = testutil::rng(2);
        let g = testutil::game(&mut rng, 3, 2, 3, 0.9);
        let v = testutil::interior_policy(&mut rng, 3, 2);
        let benign = testutil::interior_policy(&mut rng, 3, 3);
        let (br, val) = best_response_attacker(&g, &v, &benign, 0.0, 1e-8).unwrap();
        assert_eq!(br, Policy::uniform(3, 3));
        let direct = value(&g, &v, &benign).unwrap();
        assert!((val - direct).abs() < 1e-12);
        let e = exploitability(&g, &v, &benign, 0.0, 1e-8).unwrap();
        assert!((e + direct).abs() < 1e-12);
    }

    #[test]
    fn matches_deterministic_enumeration() {
        let mut rng = testutil::rng(4);
        for _ in 0..5 {
            let g = testutil::game(&mut rng, 3, 3, 3, 0.9);
            let v = testutil::interior_policy(&mut rng, 3, 3);
            let benign = testutil::interior_policy(&mut rng, 3, 3);
            let (_, val) = best_response_attacker(&g, &v, &benign, 0.6, 1e-8).unwrap();
            let mut best = f64::INFINITY;
            for code in 0..27 {
                let acts = [code % 3, (code / 3) % 3, code / 9];
                let adv = Policy::deterministic(&acts, 3).unwrap();
                let c = CoupledPolicy::new(benign.clone(), adv, 0.6).unwrap();
                best = best.min(value(&g, &v, &c.realized()).unwrap());
            }
            assert!((val - best).abs() <= 1e-8, "{val} vs {best}");
        }
    }

    #[test]
    fn victim_best_response_beats_enumeration() {
        let mut rng = testutil::rng(6);
        let g = testutil::game(&mut rng, 2, 3, 2, 0.8);
        let benign = testutil::interior_policy(&mut rng, 2, 2);
        let adv = testutil::interior_policy(&mut rng, 2, 2);
        let (_, val) = best_response_victim(&g, &benign, 0.5, &adv, 1e-8).unwrap();
        let mix = CoupledPolicy::new(benign, adv, 0.5).unwrap().realized();
        let mut best = f64::NEG_INFINITY;
        for code in 0..9 {
            let v = Policy::deterministic(&[code % 3, code / 3], 3).unwrap();
            best = best.max(value(&g, &v, &mix).unwrap());
        }
        assert!((val - best).abs() <= 1e-8);
    }

    #[test]
    fn rejects_bad_tolerance_and_budget() {
        let g = rps();
        let u = Policy::uniform(1, 3);
        assert!(matches!(best_response_attacker(&g, &u, &u, 0.5, 0.0), Err(Error::InvalidTolerance(_))));
        assert!(matches!(best_response_attacker(&g, &u, &u, 1.5, 1e-8), Err(Error::InvalidBudget(_))));
    }
}
