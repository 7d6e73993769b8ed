//! Equilibrium and robustness certificates for a candidate policy pair.

use crate::error::Result;
use crate::game::{policy_mix, MarkovGame, Policy};
use crate::sampling::{random_policy, seeded};
use crate::training::best_response::{check_tolerance, Coupling};

#[derive(Debug, Clone, PartialEq)]
pub struct NeReport {
    /// `J(ν★, α★)`.
    pub value: f64,
    /// `max_ν J(ν, α★) - J(ν★, α★)`.
    pub victim_gap: f64,
    /// `J(ν★, α★) - min_α J(ν★, α)`.
    pub attacker_gap: f64,
    pub exploitability: f64,
    /// Lowest exploitability among the challengers (`+∞` if none).
    pub challenger_min: f64,
    pub challengers: usize,
    pub is_equilibrium: bool,
    /// `Expl(ν★) ≤ Expl(ν') + tol` for every challenger.
    pub minimizes_exploitability: bool,
}

/// Checks both equilibrium inequalities through exact best responses and
/// compares `Expl(ν★)` against each challenger victim policy.
pub fn verify_ne_robustness(
    g: &MarkovGame,
    benign: &Policy,
    eps: f64,
    victim: &Policy,
    adversarial: &Policy,
    tol: f64,
    challengers: &[Policy],
) -> Result<NeReport> {
    check_tolerance(tol)?;
    g.ensure_valid()?;
    g.check_victim(victim)?;
    g.check_attacker(adversarial)?;
    let c = Coupling::new(g, benign, eps)?;
    let mix = policy_mix(benign.view(), adversarial.view(), eps);
    let value = crate::game::evaluate(g, victim.view(), mix.view())?.value;
    let (_, best_victim) = c.victim_best_response(adversarial, tol)?;
    let (_, worst_attack) = c.attacker_best_response(victim, tol)?;
    let exploitability = -worst_attack;
    let mut challenger_min = f64::INFINITY;
    for ch in challengers {
        g.check_victim(ch)?;
        challenger_min = challenger_min.min(-c.attacker_best_response(ch, tol)?.1);
    }
    let victim_gap = best_victim - value;
    let attacker_gap = value - worst_attack;
    Ok(NeReport {
        value,
        victim_gap,
        attacker_gap,
        exploitability,
        challenger_min,
        challengers: challengers.len(),
        is_equilibrium: victim_gap <= tol && attacker_gap <= tol,
        minimizes_exploitability: exploitability <= challenger_min + tol,
    })
}

/// `n` seeded Dirichlet(1) victim policies.
pub fn random_challengers(g: &MarkovGame, n: usize, seed: u64) -> Vec<Policy> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|_| random_policy(&mut rng, g.n_states(), g.n_actions_victim(), 1.0))
        .collect()
}
