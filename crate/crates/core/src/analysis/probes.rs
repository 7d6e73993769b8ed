//! Numeric probes of the Lipschitz, smoothness and gradient-domination
//! properties of `J(ν, α)`.

use ndarray::Array2;

use crate::analysis::bounds::{BoundReport, Instance};
use crate::error::Result;
use crate::game::{CoupledPolicy, MarkovGame, Policy};
use crate::gradients::{joint_gradient, JointGradient};
use crate::training::{best_response_attacker, best_response_victim, DEFAULT_TOLERANCE};

fn norm(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn inst(eps: f64, detail: &str) -> Instance {
    Instance { game_seed: None, eps, detail: detail.to_string() }
}

/// `‖∇_ν J‖ ≤ √|A_ν| / (1-γ)²` and `‖∇_α J‖ ≤ ε √|A_α| / (1-γ)²`.
pub fn probe_lipschitz(g: &MarkovGame, victim: &Policy, coupled: &CoupledPolicy) -> Result<[BoundReport; 2]> {
    let jg = joint_gradient(g, victim, coupled)?;
    let eps = coupled.budget();
    let h2 = (1.0 - g.gamma()).powi(2);
    let na = (g.n_actions_victim() as f64).sqrt();
    let nb = (g.n_actions_attacker() as f64).sqrt();
    Ok([
        BoundReport::new("lipschitz_victim", norm(&jg.victim), na / h2, inst(eps, "")),
        BoundReport::new("lipschitz_attacker", norm(&jg.attacker), eps * nb / h2, inst(eps, "")),
    ])
}

/// Gradient differences between `(ν, α)` and `(ν', α')` against
/// `(2√|A|/(1-γ)³)(√|A_ν|‖Δν‖ + √|A_α|‖Δα‖)`, with the attacker side
/// carrying an extra factor ε. Both coupled policies must share benign
/// policy and budget.
pub fn probe_smoothness(
    g: &MarkovGame,
    x: (&Policy, &CoupledPolicy),
    y: (&Policy, &CoupledPolicy),
) -> Result<[BoundReport; 2]> {
    let gx = joint_gradient(g, x.0, x.1)?;
    let gy = joint_gradient(g, y.0, y.1)?;
    let eps = x.1.budget();
    let na = (g.n_actions_victim() as f64).sqrt();
    let nb = (g.n_actions_attacker() as f64).sqrt();
    let dv = norm(&(x.0.probs() - y.0.probs()));
    let da = norm(&(x.1.adversarial().probs() - y.1.adversarial().probs()));
    let spread = na * dv + nb * da;
    let h3 = (1.0 - g.gamma()).powi(3);
    Ok([
        BoundReport::new("smoothness_victim", norm(&(&gx.victim - &gy.victim)), 2.0 * na / h3 * spread, inst(eps, "")),
        BoundReport::new(
            "smoothness_attacker",
            norm(&(&gx.attacker - &gy.attacker)),
            2.0 * eps * nb / h3 * spread,
            inst(eps, ""),
        ),
    ])
}

/// `Σ_s max_a g(s,a) - ⟨g, π⟩`: the linear maximisation over the product of
/// simplices is attained at a vertex in every state.
fn vertex_gap_max(grad: &Array2<f64>, pi: &Policy) -> f64 {
    let mut total = 0.0;
    for (s, row) in grad.rows().into_iter().enumerate() {
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let cur: f64 = row.iter().zip(pi.row(s).iter()).map(|(g, p)| g * p).sum();
        total += best - cur;
    }
    total
}

fn vertex_gap_min(grad: &Array2<f64>, pi: &Policy) -> f64 {
    let mut total = 0.0;
    for (s, row) in grad.rows().into_iter().enumerate() {
        let worst = row.iter().copied().fold(f64::INFINITY, f64::min);
        let cur: f64 = row.iter().zip(pi.row(s).iter()).map(|(g, p)| g * p).sum();
        total += cur - worst;
    }
    total
}

/// Both gradient-domination inequalities at `(ν, α)` for a given estimate
/// of the mismatch coefficient. Returned in the order (attacker, victim):
///
/// `J - min_α' J ≤ C/(1-γ) · max_ᾱ ⟨∇_α J, α - ᾱ⟩`
/// `max_ν' J - J ≤ C/(1-γ) · max_ν̄ ⟨∇_ν J, ν̄ - ν⟩`
///
/// A failure means the estimate undershoots the true coefficient.
pub fn probe_gradient_domination(
    g: &MarkovGame,
    victim: &Policy,
    coupled: &CoupledPolicy,
    c_estimate: f64,
) -> Result<[BoundReport; 2]> {
    let eps = coupled.budget();
    let JointGradient { value, victim: gv, attacker: ga } = joint_gradient(g, victim, coupled)?;
    let (_, min_value) =
        best_response_attacker(g, victim, coupled.benign(), eps, DEFAULT_TOLERANCE)?;
    let (_, max_value) =
        best_response_victim(g, coupled.benign(), eps, coupled.adversarial(), DEFAULT_TOLERANCE)?;
    let scale = c_estimate / (1.0 - g.gamma());
    let detail = format!("C={c_estimate}");
    Ok([
        BoundReport::new(
            "gradient_domination_attacker",
            value - min_value,
            scale * vertex_gap_min(&ga, coupled.adversarial()),
            inst(eps, &detail),
        ),
        BoundReport::new(
            "gradient_domination_victim",
            max_value - value,
            scale * vertex_gap_max(&gv, victim),
            inst(eps, &detail),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;
    use ndarray::{array, Array1, Array4};

    #[test]
    fn lipschitz_and_smoothness_hold_on_random_points() {
        let mut rng = testutil::rng(51);
        for gamma in [0.5, 0.9, 0.99] {
            let g = testutil::game(&mut rng, 4, 3, 2, gamma);
            let benign = testutil::interior_policy(&mut rng, 4, 2);
            let mk = |rng: &mut _| {
                (
                    testutil::interior_policy(rng, 4, 3),
                    CoupledPolicy::new(benign.clone(), testutil::interior_policy(rng, 4, 2), 0.3).unwrap(),
                )
            };
            let (v1, c1) = mk(&mut rng);
            let (v2, c2) = mk(&mut rng);
            for r in probe_lipschitz(&g, &v1, &c1).unwrap() {
                assert!(r.pass, "{r:?}");
            }
            for r in probe_smoothness(&g, (&v1, &c1), (&v2, &c2)).unwrap() {
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn victim_side_vanishes_at_best_response() {
        let mut rng = testutil::rng(53);
        let g = testutil::game(&mut rng, 3, 3, 3, 0.9);
        let benign = testutil::interior_policy(&mut rng, 3, 3);
        let adv = testutil::interior_policy(&mut rng, 3, 3);
        let (br, _) = best_response_victim(&g, &benign, 0.5, &adv, 1e-10).unwrap();
        let c = CoupledPolicy::new(benign, adv, 0.5).unwrap();
        let [_, victim_side] = probe_gradient_domination(&g, &br, &c, 1.0).unwrap();
        assert!(victim_side.lhs.abs() < 1e-9);
        assert!(victim_side.rhs >= -1e-12);
    }

    #[test]
    fn single_state_domination_with_unit_coefficient() {
        // one state: d = ρ, so the coefficient is exactly 1
        let r = array![[[0.1, 0.9, 0.4], [0.7, 0.2, 0.5]]];
        let g = MarkovGame::new(Array4::ones((1, 2, 3, 1)), r, Array1::from(vec![1.0]), 0.6).unwrap();
        let c = CoupledPolicy::new(
            Policy::new(array![[0.2, 0.5, 0.3]]).unwrap(),
            Policy::new(array![[0.6, 0.1, 0.3]]).unwrap(),
            0.8,
        )
        .unwrap();
        let v = Policy::new(array![[0.35, 0.65]]).unwrap();
        for rep in probe_gradient_domination(&g, &v, &c, 1.0).unwrap() {
            assert!(rep.pass, "{rep:?}");
            assert!(rep.lhs > 0.0);
        }
    }
}
