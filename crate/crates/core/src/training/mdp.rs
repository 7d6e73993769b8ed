//! Single-agent tabular MDP solver used by the best-response oracles.

use ndarray::{Array1, Array2, Array3};

use crate::error::Result;
use crate::linalg::solve_discounted;

/// Actions whose values differ by at most this much are treated as tied;
/// the lowest index wins.
pub const TIE_TOLERANCE: f64 = 1e-12;

const MAX_POLISH_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    fn better(self, x: f64, y: f64) -> bool {
        match self {
            Sense::Maximize => x > y,
            Sense::Minimize => x < y,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Sense::Maximize => 1.0,
            Sense::Minimize => -1.0,
        }
    }
}

/// A finite MDP with rewards `r[s][k]` and transitions `p[s][k][s']`.
#[derive(Debug, Clone)]
pub struct TabularMdp {
    pub reward: Array2<f64>,
    pub transition: Array3<f64>,
    pub gamma: f64,
}

#[derive(Debug, Clone)]
pub struct MdpSolution {
    pub actions: Vec<usize>,
    pub values: Array1<f64>,
}

impl TabularMdp {
    fn q(&self, v: &Array1<f64>) -> Array2<f64> {
        let (ns, nk) = self.reward.dim();
        Array2::from_shape_fn((ns, nk), |(s, k)| {
            let mut ev = 0.0;
            for t in 0..ns {
                ev += self.transition[[s, k, t]] * v[t];
            }
            self.reward[[s, k]] + self.gamma * ev
        })
    }

    /// Greedy action per state; lowest index among actions within
    /// [`TIE_TOLERANCE`] of the best.
    fn greedy(&self, q: &Array2<f64>, sense: Sense) -> Vec<usize> {
        q.rows()
            .into_iter()
            .map(|row| {
                let best = row.iter().copied().fold(f64::NAN, |m, x| if m.is_nan() || sense.better(x, m) { x } else { m });
                row.iter().position(|&x| (x - best).abs() <= TIE_TOLERANCE).unwrap_or(0)
            })
            .collect()
    }

    /// Exact value of a deterministic policy.
    pub fn evaluate(&self, actions: &[usize]) -> Result<Array1<f64>> {
        let ns = self.reward.nrows();
        let m = Array2::from_shape_fn((ns, ns), |(s, t)| self.transition[[s, actions[s], t]]);
        let r = Array1::from_shape_fn(ns, |s| self.reward[[s, actions[s]]]);
        solve_discounted(m.view(), self.gamma, r.view())
    }

    /// Value iteration to Bellman residual `tol (1-γ)/γ`, then exact policy
    /// iteration from the greedy policy until no state improves by more
    /// than [`TIE_TOLERANCE`].
    pub fn solve(&self, sense: Sense, tol: f64) -> Result<MdpSolution> {
        let ns = self.reward.nrows();
        let threshold = if self.gamma > 0.0 { tol * (1.0 - self.gamma) / self.gamma } else { f64::INFINITY };
        let mut v = Array1::zeros(ns);
        loop {
            let q = self.q(&v);
            let next = Array1::from_shape_fn(ns, |s| {
                let row = q.row(s);
                match sense {
                    Sense::Maximize => row.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    Sense::Minimize => row.iter().copied().fold(f64::INFINITY, f64::min),
                }
            });
            let residual = (&next - &v).iter().fold(0.0f64, |m, x| m.max(x.abs()));
            v = next;
            if residual <= threshold {
                break;
            }
        }
        let mut actions = self.greedy(&self.q(&v), sense);
        let sign = sense.sign();
        for _ in 0..MAX_POLISH_ROUNDS {
            v = self.evaluate(&actions)?;
            let q = self.q(&v);
            let mut changed = false;
            let greedy = self.greedy(&q, sense);
            for s in 0..ns {
                if sign * (q[[s, greedy[s]]] - q[[s, actions[s]]]) > TIE_TOLERANCE {
                    actions[s] = greedy[s];
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // canonical tie-breaking against the exact values
        let canonical = self.greedy(&self.q(&v), sense);
        if canonical != actions {
            actions = canonical;
            v = self.evaluate(&actions)?;
        }
        Ok(MdpSolution { actions, values: v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn two_state() -> TabularMdp {
        // action 0 stays, action 1 switches; reward 1 only in state 1
        let mut p = Array3::zeros((2, 2, 2));
        p[[0, 0, 0]] = 1.0;
        p[[0, 1, 1]] = 1.0;
        p[[1, 0, 1]] = 1.0;
        p[[1, 1, 0]] = 1.0;
        TabularMdp { reward: array![[0.0, 0.0], [1.0, 1.0]], transition: p, gamma: 0.9 }
    }

    #[test]
    fn finds_optimal_policies() {
        let m = two_state();
        let best = m.solve(Sense::Maximize, 1e-10).unwrap();
        assert_eq!(best.actions, vec![1, 0]);
        assert!((best.values[1] - 10.0).abs() < 1e-9);
        assert!((best.values[0] - 9.0).abs() < 1e-9);
        let worst = m.solve(Sense::Minimize, 1e-10).unwrap();
        assert_eq!(worst.actions, vec![0, 1]);
        assert!(worst.values[0].abs() < 1e-12);
        assert!((worst.values[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let m = TabularMdp { reward: array![[0.5, 0.5, 0.2]], transition: Array3::ones((1, 3, 1)), gamma: 0.0 };
        assert_eq!(m.solve(Sense::Maximize, 1e-8).unwrap().actions, vec![0]);
        assert_eq!(m.solve(Sense::Minimize, 1e-8).unwrap().actions, vec![2]);
    }
}
