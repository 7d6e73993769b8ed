//! Exact policy gradients of `J(ν, α) = V_ρ(ν, (1-ε) benign + ε α)` under
//! direct parameterization, a central-difference oracle, and Euclidean
//! projection onto the simplex.
//!
//! Both gradients are derivatives of the multilinear extension of `J` to the
//! ambient cube, so they agree with finite differences on raw coordinates.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::game::{evaluate, CoupledPolicy, Evaluation, MarkovGame, Policy};

/// Partial derivatives of `J` with respect to one agent's policy entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyGradient {
    per_state_action: Array2<f64>,
}

impl PolicyGradient {
    pub fn new(per_state_action: Array2<f64>) -> Result<Self> {
        if per_state_action.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("gradient entry".into()));
        }
        Ok(PolicyGradient { per_state_action })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.per_state_action
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.per_state_action[[s, a]]
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.per_state_action
    }

    /// Euclidean (Frobenius) norm.
    pub fn norm(&self) -> f64 {
        self.per_state_action.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.per_state_action.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agent {
    Victim,
    Attacker,
}

/// `J` and both gradients from a single evaluation.
#[derive(Debug, Clone)]
pub struct JointGradient {
    pub value: f64,
    pub victim: Array2<f64>,
    pub attacker: Array2<f64>,
}

fn check(g: &MarkovGame, victim: &Policy, coupled: &CoupledPolicy) -> Result<()> {
    g.ensure_valid()?;
    g.check_victim(victim)?;
    g.check_attacker(coupled.benign())
}

/// Gradients on raw coordinates. `mix` is the realized attacker policy.
pub(crate) fn gradients_raw(
    g: &MarkovGame,
    victim: ArrayView2<f64>,
    mix: ArrayView2<f64>,
    eps: f64,
) -> Result<JointGradient> {
    let Evaluation { occupancy, q, value, .. } = evaluate(g, victim, mix)?;
    let (ns, na, nb) = q.dim();
    let c = 1.0 / (1.0 - g.gamma());
    let mut gv = Array2::zeros((ns, na));
    let mut ga = Array2::zeros((ns, nb));
    for s in 0..ns {
        let w = c * occupancy[s];
        for a in 0..na {
            for b in 0..nb {
                let qsab = q[[s, a, b]];
                gv[[s, a]] += w * mix[[s, b]] * qsab;
                ga[[s, b]] += eps * w * victim[[s, a]] * qsab;
            }
        }
    }
    Ok(JointGradient { value, victim: gv, attacker: ga })
}

pub fn joint_gradient(g: &MarkovGame, victim: &Policy, coupled: &CoupledPolicy) -> Result<JointGradient> {
    check(g, victim, coupled)?;
    let mix = coupled.realized();
    gradients_raw(g, victim.view(), mix.view(), coupled.budget())
}

/// `∂J/∂ν(a|s) = d(s)/(1-γ) · E_{b∼mix}[Q(s,a,b)]`.
pub fn grad_victim(g: &MarkovGame, victim: &Policy, coupled: &CoupledPolicy) -> Result<PolicyGradient> {
    PolicyGradient::new(joint_gradient(g, victim, coupled)?.victim)
}

/// `∂J/∂α(b|s) = ε · d(s)/(1-γ) · E_{a∼ν}[Q(s,a,b)]`.
pub fn grad_attacker(g: &MarkovGame, victim: &Policy, coupled: &CoupledPolicy) -> Result<PolicyGradient> {
    PolicyGradient::new(joint_gradient(g, victim, coupled)?.attacker)
}

/// Central differences of `J` on raw policy coordinates. Perturbed entries
/// are clipped to `[0, 1]` and rows are not renormalised. Verification only.
pub fn finite_difference_gradient(
    g: &MarkovGame,
    victim: &Policy,
    coupled: &CoupledPolicy,
    which: Agent,
    step: f64,
) -> Result<PolicyGradient> {
    check(g, victim, coupled)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidTolerance(step));
    }
    let eps = coupled.budget();
    let benign = coupled.benign().view();
    let j = |v: ArrayView2<f64>, adv: ArrayView2<f64>| -> Result<f64> {
        let mix = crate::game::policy_mix(benign, adv, eps);
        Ok(evaluate(g, v, mix.view())?.value)
    };
    let mut x = match which {
        Agent::Victim => victim.probs().clone(),
        Agent::Attacker => coupled.adversarial().probs().clone(),
    };
    let mut out = Array2::zeros(x.dim());
    for ((s, a), o) in out.indexed_iter_mut() {
        let x0 = x[[s, a]];
        let hi = (x0 + step).min(1.0);
        let lo = (x0 - step).max(0.0);
        x[[s, a]] = hi;
        let jp = match which {
            Agent::Victim => j(x.view(), coupled.adversarial().view())?,
            Agent::Attacker => j(victim.view(), x.view())?,
        };
        x[[s, a]] = lo;
        let jm = match which {
            Agent::Victim => j(x.view(), coupled.adversarial().view())?,
            Agent::Attacker => j(victim.view(), x.view())?,
        };
        x[[s, a]] = x0;
        *o = (jp - jm) / (hi - lo);
    }
    PolicyGradient::new(out)
}

/// Euclidean projection onto the probability simplex by sort-and-threshold.
pub fn project_simplex(v: ArrayView1<f64>) -> Result<Array1<f64>> {
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("projection input".into()));
    }
    let mut u: Vec<f64> = v.to_vec();
    // stable sort: equal entries keep index order
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    Ok(v.mapv(|x| (x - theta).max(0.0)))
}

/// Projects every row of `x` onto the simplex.
pub fn project_policy(x: ArrayView2<f64>) -> Result<Policy> {
    let mut out = Array2::zeros(x.dim());
    for (s, row) in x.rows().into_iter().enumerate() {
        out.row_mut(s).assign(&project_simplex(row)?);
    }
    Ok(Policy::from_array_unchecked(out))
}

/// `proj(π + step · grad)` row by row; a negative step descends.
pub fn projected_step(policy: &Policy, grad: &Array2<f64>, step: f64) -> Result<Policy> {
    let x = policy.probs() + &(grad * step);
    project_policy(x.view())
}
