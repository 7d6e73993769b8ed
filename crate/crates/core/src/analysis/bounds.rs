//! Numerical checks of the value, visitation and marginalised-dynamics
//! discrepancy bounds under an ε-coupled attack.

use ndarray::Array1;

use crate::analysis::divergence::FDivergence;
use crate::error::Result;
use crate::game::{state_visitation, value, CoupledPolicy, MarkovGame, Policy};

/// A report passes when `rhs - lhs ≥ -PASS_MARGIN`.
pub const PASS_MARGIN: f64 = 1e-9;

/// Identifies the instance a report was computed on.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Instance {
    pub game_seed: Option<u64>,
    pub eps: f64,
    /// Free-form location inside the instance, e.g. `s=1,a_v=0`.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub bound: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub instance: Instance,
}

impl BoundReport {
    pub fn new(bound: impl Into<String>, lhs: f64, rhs: f64, instance: Instance) -> Self {
        let slack = rhs - lhs;
        BoundReport { bound: bound.into(), lhs, rhs, slack, pass: slack >= -PASS_MARGIN, instance }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.instance.game_seed = Some(seed);
        self
    }
}

fn instance(eps: f64) -> Instance {
    Instance { game_seed: None, eps, detail: String::new() }
}

/// `|V(ν, benign) - V(ν, realized)| ≤ 2ε / (1-γ)²`.
pub fn verify_value_bound(g: &MarkovGame, victim: &Policy, coupled: &CoupledPolicy) -> Result<BoundReport> {
    let eps = coupled.budget();
    let lhs = (value(g, victim, coupled.benign())? - value(g, victim, &coupled.realized())?).abs();
    let rhs = 2.0 * eps / (1.0 - g.gamma()).powi(2);
    Ok(BoundReport::new("value_bound", lhs, rhs, instance(eps)))
}

/// `‖d(ν, benign) - d(ν, realized)‖₁ ≤ 2γε / (1-γ)`.
pub fn verify_visitation_bound(g: &MarkovGame, victim: &Policy, coupled: &CoupledPolicy) -> Result<BoundReport> {
    let eps = coupled.budget();
    let d0 = state_visitation(g, victim, coupled.benign())?;
    let d1 = state_visitation(g, victim, &coupled.realized())?;
    let rhs = 2.0 * g.gamma() * eps / (1.0 - g.gamma());
    Ok(BoundReport::new("visitation_bound", d0.l1_distance(&d1), rhs, instance(eps)))
}

/// `P(·|s, a_v)` with the attacker's action averaged under `attacker`.
pub fn marginalized_dynamics(g: &MarkovGame, attacker: &Policy, s: usize, a: usize) -> Array1<f64> {
    let ns = g.n_states();
    let mut out = Array1::zeros(ns);
    for b in 0..g.n_actions_attacker() {
        let w = attacker.get(s, b);
        for t in 0..ns {
            out[t] += w * g.transition()[[s, a, b, t]];
        }
    }
    out
}

/// Data-processing check at every `(s, a_v)`:
/// `D_f(P^{realized}(·|s,a_v) ‖ P^{benign}(·|s,a_v)) ≤ D_f(realized(·|s) ‖ benign(·|s))`.
pub fn verify_marginalized_dynamics_bound(
    g: &MarkovGame,
    coupled: &CoupledPolicy,
    f: FDivergence,
) -> Result<Vec<BoundReport>> {
    g.ensure_valid()?;
    g.check_attacker(coupled.benign())?;
    let realized = coupled.realized();
    let benign = coupled.benign();
    let mut out = Vec::with_capacity(g.n_states() * g.n_actions_victim());
    for s in 0..g.n_states() {
        let rhs = f.compute(realized.row(s), benign.row(s))?;
        for a in 0..g.n_actions_victim() {
            let p = marginalized_dynamics(g, &realized, s, a);
            let q = marginalized_dynamics(g, benign, s, a);
            let lhs = f.compute(p.view(), q.view())?;
            let inst = Instance { game_seed: None, eps: coupled.budget(), detail: format!("s={s},a_v={a}") };
            out.push(BoundReport::new(format!("dynamics_{}", f.name()), lhs, rhs, inst));
        }
    }
    Ok(out)
}
