//! Candidate-set estimate of the minimax mismatch coefficient.

use crate::error::{Error, Result};
use crate::game::{evaluate, policy_mix, MarkovGame, Policy};
use crate::sampling::{random_policy, seeded};
use crate::training::{Coupling, DEFAULT_TOLERANCE};

/// Largest number of deterministic policies enumerated per agent.
pub const MAX_ENUMERATION: u128 = 1_000_000;
/// Largest number of joint evaluations in enumerate mode.
pub const MAX_PAIRS: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MismatchMode {
    /// All deterministic policies of both agents.
    EnumerateDeterministic,
    /// `n` Dirichlet(1) policies per agent as outer candidates, each paired
    /// with the oracle best response as the inner candidate.
    RandomSample { n: usize, seed: u64 },
}

impl MismatchMode {
    pub fn tag(&self) -> String {
        match self {
            MismatchMode::EnumerateDeterministic => "enumerate_deterministic".into(),
            MismatchMode::RandomSample { n, .. } => format!("random_sample({n})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MismatchEstimate {
    /// Estimated coefficient over the examined candidates.
    pub estimate: f64,
    pub method: String,
    /// Number of policies examined across both agents.
    pub candidates: usize,
}

fn count(n_actions: usize, n_states: usize) -> u128 {
    (n_actions as u128).saturating_pow(n_states as u32)
}

fn deterministic_policies(n_states: usize, n_actions: usize) -> Vec<Policy> {
    let total = count(n_actions, n_states) as usize;
    (0..total)
        .map(|mut code| {
            let acts: Vec<usize> = (0..n_states)
                .map(|_| {
                    let a = code % n_actions;
                    code /= n_actions;
                    a
                })
                .collect();
            Policy::deterministic(&acts, n_actions).expect("in range")
        })
        .collect()
}

/// `max { max_ν min_{α ∈ BR(ν)} ‖d/ρ‖∞, max_α min_{ν ∈ BR(α)} ‖d/ρ‖∞ }`
/// with both the outer maximisation and the best-response sets restricted to
/// a candidate set. Best-response sets are approximated at `tol`.
pub fn estimate_mismatch(
    g: &MarkovGame,
    benign: &Policy,
    eps: f64,
    mode: MismatchMode,
    tol: f64,
) -> Result<MismatchEstimate> {
    g.ensure_valid()?;
    g.check_attacker(benign)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    if let Some(s) = g.rho().iter().position(|&p| p <= 0.0) {
        return Err(Error::ZeroInitialMass(s));
    }
    let ratio = |v: &Policy, a: &Policy| -> Result<(f64, f64)> {
        let mix = policy_mix(benign.view(), a.view(), eps);
        let e = evaluate(g, v.view(), mix.view())?;
        let r = e.occupancy.iter().zip(g.rho().iter()).map(|(d, r)| d / r).fold(0.0, f64::max);
        Ok((e.value, r))
    };
    let (ns, na, nb) = (g.n_states(), g.n_actions_victim(), g.n_actions_attacker());
    match mode {
        MismatchMode::EnumerateDeterministic => {
            let (cv, ca) = (count(na, ns), count(nb, ns));
            for c in [cv, ca] {
                if c > MAX_ENUMERATION {
                    return Err(Error::EnumerationTooLarge(c, MAX_ENUMERATION));
                }
            }
            if cv * ca > MAX_PAIRS {
                return Err(Error::EnumerationTooLarge(cv * ca, MAX_PAIRS));
            }
            let vs = deterministic_policies(ns, na);
            let as_ = deterministic_policies(ns, nb);
            let mut table = vec![(0.0, 0.0); vs.len() * as_.len()];
            for (i, v) in vs.iter().enumerate() {
                for (j, a) in as_.iter().enumerate() {
                    table[i * as_.len() + j] = ratio(v, a)?;
                }
            }
            let at = |i: usize, j: usize| table[i * as_.len() + j];
            let mut c1: f64 = 0.0;
            for i in 0..vs.len() {
                let best = (0..as_.len()).map(|j| at(i, j).0).fold(f64::INFINITY, f64::min);
                let inner = (0..as_.len())
                    .filter(|&j| at(i, j).0 <= best + tol)
                    .map(|j| at(i, j).1)
                    .fold(f64::INFINITY, f64::min);
                c1 = c1.max(inner);
            }
            let mut c2: f64 = 0.0;
            for j in 0..as_.len() {
                let best = (0..vs.len()).map(|i| at(i, j).0).fold(f64::NEG_INFINITY, f64::max);
                let inner = (0..vs.len())
                    .filter(|&i| at(i, j).0 >= best - tol)
                    .map(|i| at(i, j).1)
                    .fold(f64::INFINITY, f64::min);
                c2 = c2.max(inner);
            }
            Ok(MismatchEstimate { estimate: c1.max(c2), method: mode.tag(), candidates: vs.len() + as_.len() })
        }
        MismatchMode::RandomSample { n, seed } => {
            let c = Coupling::new(g, benign, eps)?;
            let mut rng = seeded(seed);
            let mut est: f64 = 0.0;
            for _ in 0..n {
                let v = random_policy(&mut rng, ns, na, 1.0);
                let (br, _) = c.attacker_best_response(&v, DEFAULT_TOLERANCE.min(tol))?;
                est = est.max(ratio(&v, &br)?.1);
                let a = random_policy(&mut rng, ns, nb, 1.0);
                let (br, _) = c.victim_best_response(&a, DEFAULT_TOLERANCE.min(tol))?;
                est = est.max(ratio(&br, &a)?.1);
            }
            Ok(MismatchEstimate { estimate: est, method: mode.tag(), candidates: 2 * n })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{state_visitation, value, CoupledPolicy};
    use crate::testutil;
    use ndarray::{array, Array1, Array3, Array4};

    #[test]
    fn single_state_is_one() {
        let r = Array3::from_shape_fn((1, 2, 3), |(_, a, b)| (a + b) as f64 / 4.0);
        let g = MarkovGame::new(Array4::ones((1, 2, 3, 1)), r, Array1::from(vec![1.0]), 0.9).unwrap();
        let b = Policy::uniform(1, 3);
        for mode in [MismatchMode::EnumerateDeterministic, MismatchMode::RandomSample { n: 10, seed: 0 }] {
            assert_eq!(estimate_mismatch(&g, &b, 0.5, mode, 1e-8).unwrap().estimate, 1.0);
        }
    }

    #[test]
    fn uniform_mixing_is_one() {
        let p = Array4::from_elem((3, 2, 2, 3), 1.0 / 3.0);
        let mut rng = testutil::rng(61);
        let r = Array3::from_shape_fn((3, 2, 2), |_| rand::Rng::random::<f64>(&mut rng));
        let g = MarkovGame::new(p, r, Array1::from(vec![1.0 / 3.0; 3]), 0.9).unwrap();
        let e = estimate_mismatch(&g, &Policy::uniform(3, 2), 0.7, MismatchMode::EnumerateDeterministic, 1e-8).unwrap();
        assert!((e.estimate - 1.0).abs() < 1e-12);
        assert_eq!(e.candidates, 16);
    }

    #[test]
    fn matches_hand_enumeration() {
        let mut rng = testutil::rng(67);
        let g = testutil::game(&mut rng, 2, 2, 2, 0.8);
        let benign = testutil::interior_policy(&mut rng, 2, 2);
        let eps = 0.6;
        let e = estimate_mismatch(&g, &benign, eps, MismatchMode::EnumerateDeterministic, 1e-8).unwrap();
        // independent enumeration over the 4 x 4 deterministic pairs
        let pol = |code: usize| Policy::deterministic(&[code % 2, code / 2], 2).unwrap();
        let mut j = [[0.0; 4]; 4];
        let mut c = [[0.0; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                let mix = CoupledPolicy::new(benign.clone(), pol(k), eps).unwrap().realized();
                j[i][k] = value(&g, &pol(i), &mix).unwrap();
                let d = state_visitation(&g, &pol(i), &mix).unwrap();
                c[i][k] = (d.get(0) / 0.5).max(d.get(1) / 0.5);
            }
        }
        let mut c1: f64 = 0.0;
        for i in 0..4 {
            let m = j[i].iter().copied().fold(f64::INFINITY, f64::min);
            let inner = (0..4).filter(|&k| j[i][k] <= m + 1e-8).map(|k| c[i][k]).fold(f64::INFINITY, f64::min);
            c1 = c1.max(inner);
        }
        let mut c2: f64 = 0.0;
        for k in 0..4 {
            let m = (0..4).map(|i| j[i][k]).fold(f64::NEG_INFINITY, f64::max);
            let inner = (0..4).filter(|&i| j[i][k] >= m - 1e-8).map(|i| c[i][k]).fold(f64::INFINITY, f64::min);
            c2 = c2.max(inner);
        }
        assert!((e.estimate - c1.max(c2)).abs() < 1e-12);
        assert!(e.estimate >= 1.0);
    }

    #[test]
    fn zero_initial_mass_is_rejected() {
        let g = MarkovGame::new(
            Array4::from_elem((2, 1, 1, 2), 0.5),
            Array3::zeros((2, 1, 1)),
            array![1.0, 0.0],
            0.5,
        )
        .unwrap();
        assert!(matches!(
            estimate_mismatch(&g, &Policy::uniform(2, 1), 0.5, MismatchMode::EnumerateDeterministic, 1e-8),
            Err(Error::ZeroInitialMass(1))
        ));
    }
}
