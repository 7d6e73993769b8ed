use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Tolerances;

/// Per-state distribution over one agent's actions, stored as `probs[s][a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Policy {
    probs: Array2<f64>,
}

impl Policy {
    pub fn new(probs: Array2<f64>) -> Result<Self> {
        Self::new_with(probs, &Tolerances::DEFAULT)
    }

    pub fn new_with(probs: Array2<f64>, tol: &Tolerances) -> Result<Self> {
        if probs.nrows() == 0 || probs.ncols() == 0 {
            return Err(Error::InvalidPolicy("empty policy".into()));
        }
        for (s, row) in probs.rows().into_iter().enumerate() {
            check_row(s, row, tol.stochastic)?;
        }
        Ok(Policy { probs })
    }

    /// Wraps rows already known to be distributions (projection output).
    pub(crate) fn from_array_unchecked(probs: Array2<f64>) -> Self {
        debug_assert!(probs
            .rows()
            .into_iter()
            .all(|r| (r.sum() - 1.0).abs() < 1e-9 && r.iter().all(|&p| p >= 0.0)));
        Policy { probs }
    }

    pub fn uniform(n_states: usize, n_actions: usize) -> Self {
        Policy { probs: Array2::from_elem((n_states, n_actions), 1.0 / n_actions as f64) }
    }

    /// One action per state, with probability one.
    pub fn deterministic(actions: &[usize], n_actions: usize) -> Result<Self> {
        let mut probs = Array2::zeros((actions.len(), n_actions));
        for (s, &a) in actions.iter().enumerate() {
            if a >= n_actions {
                return Err(Error::InvalidPolicy(format!("action {a} at state {s} out of range")));
            }
            probs[[s, a]] = 1.0;
        }
        Self::new(probs)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("ragged policy rows".into()));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let probs = Array2::from_shape_vec((n, m), flat).map_err(|e| Error::Dimension(e.to_string()))?;
        Self::new(probs)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.probs.rows().into_iter().map(|r| r.to_vec()).collect()
    }

    pub fn n_states(&self) -> usize {
        self.probs.nrows()
    }

    pub fn n_actions(&self) -> usize {
        self.probs.ncols()
    }

    pub fn probs(&self) -> &Array2<f64> {
        &self.probs
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.probs.view()
    }

    pub fn row(&self, s: usize) -> ArrayView1<'_, f64> {
        self.probs.row(s)
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.probs[[s, a]]
    }

    /// Returns the pure action at every state, if the policy is deterministic.
    pub fn as_deterministic(&self) -> Option<Vec<usize>> {
        self.probs
            .rows()
            .into_iter()
            .map(|r| r.iter().position(|&p| p == 1.0))
            .collect()
    }
}

fn check_row(s: usize, row: ArrayView1<f64>, tol: f64) -> Result<()> {
    let mut sum = 0.0;
    for (a, &p) in row.iter().enumerate() {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::InvalidPolicy(format!("probability {p} at state {s}, action {a}")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > tol {
        return Err(Error::InvalidPolicy(format!("row {s} sums to {sum}")));
    }
    Ok(())
}

impl TryFrom<Vec<Vec<f64>>> for Policy {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Policy::from_rows(rows)
    }
}

impl From<Policy> for Vec<Vec<f64>> {
    fn from(p: Policy) -> Self {
        p.to_rows()
    }
}

/// The attacker's realized behaviour `(1 - ε) benign + ε adversarial`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPolicy {
    benign: Policy,
    adversarial: Policy,
    budget: f64,
}

impl CoupledPolicy {
    pub fn new(benign: Policy, adversarial: Policy, budget: f64) -> Result<Self> {
        check_budget(budget)?;
        if benign.probs.dim() != adversarial.probs.dim() {
            return Err(Error::Dimension(format!(
                "benign policy {:?} and adversarial policy {:?} differ in shape",
                benign.probs.dim(),
                adversarial.probs.dim()
            )));
        }
        Ok(CoupledPolicy { benign, adversarial, budget })
    }

    pub fn benign(&self) -> &Policy {
        &self.benign
    }

    pub fn adversarial(&self) -> &Policy {
        &self.adversarial
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn realized(&self) -> Policy {
        Policy { probs: mix(self.benign.view(), self.adversarial.view(), self.budget) }
    }
}

pub(crate) fn check_budget(eps: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::InvalidBudget(eps))
    }
}

/// `(1 - eps) * benign + eps * adversarial`, entrywise. Works on unnormalised
/// inputs so finite differences can perturb the adversarial coordinates.
pub(crate) fn mix(benign: ArrayView2<f64>, adversarial: ArrayView2<f64>, eps: f64) -> Array2<f64> {
    let mut out = benign.to_owned();
    out.zip_mut_with(&adversarial, |b, &a| *b = (1.0 - eps) * *b + eps * a);
    out
}
