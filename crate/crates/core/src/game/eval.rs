//! Exact policy evaluation by dense linear solves.

use ndarray::{Array1, Array2, Array3, ArrayView2};

use crate::error::Result;
use crate::game::{MarkovGame, Policy};
use crate::linalg::{solve_discounted, solve_discounted_transposed};

/// Discounted, normalised state-visitation distribution `d = (1-γ)(I-γP_π)^{-1} ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyMeasure {
    dist: Array1<f64>,
}

impl OccupancyMeasure {
    pub fn dist(&self) -> &Array1<f64> {
        &self.dist
    }

    pub fn get(&self, s: usize) -> f64 {
        self.dist[s]
    }

    pub fn into_inner(self) -> Array1<f64> {
        self.dist
    }

    /// `‖d - other‖₁`.
    pub fn l1_distance(&self, other: &OccupancyMeasure) -> f64 {
        self.dist.iter().zip(other.dist.iter()).map(|(a, b)| (a - b).abs()).sum()
    }

    /// `max_s d(s) / ρ(s)`; infinite if ρ has a zero where d does not.
    pub fn max_ratio(&self, rho: &Array1<f64>) -> f64 {
        self.dist
            .iter()
            .zip(rho.iter())
            .map(|(&d, &r)| if r > 0.0 { d / r } else if d > 0.0 { f64::INFINITY } else { 0.0 })
            .fold(0.0, f64::max)
    }
}

/// Everything exact evaluation produces for one joint policy.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    /// Occupancy `d` (unnormalised if the inputs are).
    pub occupancy: Array1<f64>,
    /// `Q(s, a_v, a_a)`.
    pub q: Array3<f64>,
    /// `ρ · V`.
    pub value: f64,
}

/// Row-form state chain `M[s][s'] = Σ ν(a|s) α(b|s) P(s'|s,a,b)` and the
/// policy-averaged reward. Inputs are not checked to be distributions.
pub(crate) fn chain(g: &MarkovGame, victim: ArrayView2<f64>, attacker: ArrayView2<f64>) -> (Array2<f64>, Array1<f64>) {
    let ns = g.n_states();
    let (na, nb) = (g.n_actions_victim(), g.n_actions_attacker());
    let p = g.transition();
    let r = g.reward();
    let mut m = Array2::zeros((ns, ns));
    let mut rp = Array1::zeros(ns);
    for s in 0..ns {
        for a in 0..na {
            let pa = victim[[s, a]];
            if pa == 0.0 {
                continue;
            }
            for b in 0..nb {
                let w = pa * attacker[[s, b]];
                if w == 0.0 {
                    continue;
                }
                rp[s] += w * r[[s, a, b]];
                for t in 0..ns {
                    m[[s, t]] += w * p[[s, a, b, t]];
                }
            }
        }
    }
    (m, rp)
}

pub(crate) fn state_values(g: &MarkovGame, victim: ArrayView2<f64>, attacker: ArrayView2<f64>) -> Result<Array1<f64>> {
    let (m, rp) = chain(g, victim, attacker);
    solve_discounted(m.view(), g.gamma(), rp.view())
}

/// `Q(s,a,b) = r(s,a,b) + γ Σ_{s'} P(s'|s,a,b) V(s')`.
pub(crate) fn q_from_values(g: &MarkovGame, v: &Array1<f64>) -> Array3<f64> {
    let (ns, na, nb) = g.reward().dim();
    let p = g.transition();
    let gamma = g.gamma();
    Array3::from_shape_fn((ns, na, nb), |(s, a, b)| {
        let mut ev = 0.0;
        for t in 0..ns {
            ev += p[[s, a, b, t]] * v[t];
        }
        g.reward()[[s, a, b]] + gamma * ev
    })
}

/// Full evaluation on raw coordinates. Callers validate shapes.
pub(crate) fn evaluate(g: &MarkovGame, victim: ArrayView2<f64>, attacker: ArrayView2<f64>) -> Result<Evaluation> {
    let (m, rp) = chain(g, victim, attacker);
    let gamma = g.gamma();
    let state_values = solve_discounted(m.view(), gamma, rp.view())?;
    let mut occupancy = solve_discounted_transposed(m.view(), gamma, g.rho().view())?;
    occupancy *= 1.0 - gamma;
    let q = q_from_values(g, &state_values);
    let value = g.rho().dot(&state_values);
    Ok(Evaluation { occupancy, q, value })
}

fn check(g: &MarkovGame, victim: &Policy, attacker: &Policy) -> Result<()> {
    g.ensure_valid()?;
    g.check_victim(victim)?;
    g.check_attacker(attacker)
}

/// State-to-state matrix `P_π[s'][s]`; each column is a distribution.
pub fn joint_transition_matrix(g: &MarkovGame, victim: &Policy, attacker: &Policy) -> Result<Array2<f64>> {
    check(g, victim, attacker)?;
    let (m, _) = chain(g, victim.view(), attacker.view());
    Ok(m.reversed_axes())
}

pub fn state_visitation(g: &MarkovGame, victim: &Policy, attacker: &Policy) -> Result<OccupancyMeasure> {
    check(g, victim, attacker)?;
    let (m, _) = chain(g, victim.view(), attacker.view());
    let mut dist = solve_discounted_transposed(m.view(), g.gamma(), g.rho().view())?;
    dist *= 1.0 - g.gamma();
    Ok(OccupancyMeasure { dist })
}

/// Victim value `V_ρ(π_ν, π_α)` for the realized attacker policy.
pub fn value(g: &MarkovGame, victim: &Policy, attacker: &Policy) -> Result<f64> {
    check(g, victim, attacker)?;
    Ok(g.rho().dot(&state_values(g, victim.view(), attacker.view())?))
}

pub fn q_function(g: &MarkovGame, victim: &Policy, attacker: &Policy) -> Result<Array3<f64>> {
    check(g, victim, attacker)?;
    let v = state_values(g, victim.view(), attacker.view())?;
    Ok(q_from_values(g, &v))
}
