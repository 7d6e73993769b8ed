//! Tabular two-agent Markov games.
//!
//! A [`MarkovGame`] stores the victim's reward tensor `r[s][a_v][a_a]`, the
//! transition tensor `P[s][a_v][a_a][s']`, the initial distribution and the
//! discount. Games are immutable; invariants are checked once at
//! construction and the resulting violation list is kept alongside the data.

mod eval;
mod fold;
mod io;
mod policy;

use std::fmt;

use ndarray::{Array1, Array3, Array4};

use crate::error::{Error, Result};

pub use eval::{joint_transition_matrix, q_function, state_visitation, value, OccupancyMeasure};
pub(crate) use eval::{evaluate, Evaluation};
pub use fold::fold_coupling;
pub use io::GameDocument;
pub use policy::{CoupledPolicy, Policy};
pub(crate) use policy::{check_budget, mix as policy_mix};

/// Largest accepted discount. Occupancy normalisation degenerates as γ → 1.
pub const MAX_DISCOUNT: f64 = 0.999;

/// Numerical tolerances used by validation and fixed-point checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of a probability row sum from 1.
    pub stochastic: f64,
    /// Allowed residual of linear solves / fixed points.
    pub solve: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances { stochastic: 1e-12, solve: 1e-10 };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Affine map applied to raw rewards: `scaled = scale * raw + offset`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RewardRescale {
    pub scale: f64,
    pub offset: f64,
}

impl RewardRescale {
    /// Maps a discounted value computed on scaled rewards back to raw units.
    pub fn raw_value(&self, scaled: f64, gamma: f64) -> f64 {
        (scaled - self.offset / (1.0 - gamma)) / self.scale
    }

    /// Maps an exploitability (negated worst-case value) back to raw units.
    pub fn raw_exploitability(&self, scaled: f64, gamma: f64) -> f64 {
        -self.raw_value(-scaled, gamma)
    }
}

/// A violated game invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RowStochasticity { state: usize, victim_action: usize, attacker_action: usize, sum: f64 },
    NegativeTransition { state: usize, victim_action: usize, attacker_action: usize, next_state: usize, value: f64 },
    InitialDistribution { sum: f64 },
    NegativeInitial { state: usize, value: f64 },
    RewardRange { state: usize, victim_action: usize, attacker_action: usize, value: f64 },
    Discount { gamma: f64 },
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowStochasticity { state, victim_action, attacker_action, sum } => write!(
                f,
                "row-stochasticity: transition(s={state}, a_v={victim_action}, a_a={attacker_action}) sums to {sum}"
            ),
            Violation::NegativeTransition { state, victim_action, attacker_action, next_state, value } => write!(
                f,
                "negative transition: P(s'={next_state} | s={state}, a_v={victim_action}, a_a={attacker_action}) = {value}"
            ),
            Violation::InitialDistribution { sum } => write!(f, "initial distribution sums to {sum}"),
            Violation::NegativeInitial { state, value } => {
                write!(f, "initial distribution negative at state {state}: {value}")
            }
            Violation::RewardRange { state, victim_action, attacker_action, value } => write!(
                f,
                "reward out of [0, 1]: r(s={state}, a_v={victim_action}, a_a={attacker_action}) = {value}"
            ),
            Violation::Discount { gamma } => {
                write!(f, "discount {gamma} outside [0, {MAX_DISCOUNT}]")
            }
            Violation::Empty => write!(f, "game has an empty state or action set"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovGame {
    transition: Array4<f64>,
    reward: Array3<f64>,
    rho: Array1<f64>,
    gamma: f64,
    rescale: Option<RewardRescale>,
    violations: Vec<Violation>,
}

impl MarkovGame {
    /// Builds a game and rejects it if any invariant is violated.
    pub fn new(transition: Array4<f64>, reward: Array3<f64>, rho: Array1<f64>, gamma: f64) -> Result<Self> {
        let g = Self::from_arrays(transition, reward, rho, gamma)?;
        g.ensure_valid()?;
        Ok(g)
    }

    /// Builds a game checking only that the array shapes agree. The
    /// violation list is computed and available through [`validate_game`].
    pub fn from_arrays(
        transition: Array4<f64>,
        reward: Array3<f64>,
        rho: Array1<f64>,
        gamma: f64,
    ) -> Result<Self> {
        Self::from_arrays_with(transition, reward, rho, gamma, &Tolerances::DEFAULT)
    }

    pub fn from_arrays_with(
        transition: Array4<f64>,
        reward: Array3<f64>,
        rho: Array1<f64>,
        gamma: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        let (s, a, b) = reward.dim();
        let td = transition.dim();
        if td != (s, a, b, s) {
            return Err(Error::Dimension(format!(
                "transition shape {td:?} does not match reward shape ({s}, {a}, {b}) with {s} next states"
            )));
        }
        if rho.len() != s {
            return Err(Error::Dimension(format!(
                "initial distribution has {} entries for {s} states",
                rho.len()
            )));
        }
        let mut g = MarkovGame { transition, reward, rho, gamma, rescale: None, violations: Vec::new() };
        g.violations = check_invariants(&g, tol);
        Ok(g)
    }

    pub fn with_rescale(mut self, rescale: RewardRescale) -> Self {
        self.rescale = Some(rescale);
        self
    }

    pub fn n_states(&self) -> usize {
        self.rho.len()
    }

    pub fn n_actions_victim(&self) -> usize {
        self.reward.dim().1
    }

    pub fn n_actions_attacker(&self) -> usize {
        self.reward.dim().2
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho(&self) -> &Array1<f64> {
        &self.rho
    }

    pub fn reward(&self) -> &Array3<f64> {
        &self.reward
    }

    pub fn transition(&self) -> &Array4<f64> {
        &self.transition
    }

    pub fn rescale(&self) -> Option<RewardRescale> {
        self.rescale
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        if self.violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGame(self.violations.clone()))
        }
    }

    /// Upper bound on any discounted victim value, `1 / (1 - γ)`.
    pub fn value_bound(&self) -> f64 {
        1.0 / (1.0 - self.gamma)
    }

    /// Converts a scaled value to raw units, or returns it unchanged when
    /// the game carries no rescale metadata.
    pub fn raw_value(&self, scaled: f64) -> f64 {
        match self.rescale {
            Some(r) => r.raw_value(scaled, self.gamma),
            None => scaled,
        }
    }

    pub fn raw_exploitability(&self, scaled: f64) -> f64 {
        match self.rescale {
            Some(r) => r.raw_exploitability(scaled, self.gamma),
            None => scaled,
        }
    }

    pub(crate) fn check_victim(&self, p: &Policy) -> Result<()> {
        check_shape(p, self.n_states(), self.n_actions_victim(), "victim")
    }

    pub(crate) fn check_attacker(&self, p: &Policy) -> Result<()> {
        check_shape(p, self.n_states(), self.n_actions_attacker(), "attacker")
    }
}

fn check_shape(p: &Policy, s: usize, a: usize, who: &str) -> Result<()> {
    if p.n_states() != s || p.n_actions() != a {
        return Err(Error::Dimension(format!(
            "{who} policy is {}x{}, game expects {s}x{a}",
            p.n_states(),
            p.n_actions()
        )));
    }
    Ok(())
}

/// Returns every violated invariant; an empty list means the game is valid.
pub fn validate_game(g: &MarkovGame) -> Vec<Violation> {
    g.violations.clone()
}

fn check_invariants(g: &MarkovGame, tol: &Tolerances) -> Vec<Violation> {
    let mut out = Vec::new();
    let (ns, na, nb) = g.reward.dim();
    if ns == 0 || na == 0 || nb == 0 {
        out.push(Violation::Empty);
        return out;
    }
    for s in 0..ns {
        for a in 0..na {
            for b in 0..nb {
                let mut sum = 0.0;
                for t in 0..ns {
                    let p = g.transition[[s, a, b, t]];
                    if !(p >= 0.0) {
                        out.push(Violation::NegativeTransition {
                            state: s,
                            victim_action: a,
                            attacker_action: b,
                            next_state: t,
                            value: p,
                        });
                    }
                    sum += p;
                }
                if !((sum - 1.0).abs() <= tol.stochastic) {
                    out.push(Violation::RowStochasticity {
                        state: s,
                        victim_action: a,
                        attacker_action: b,
                        sum,
                    });
                }
                let r = g.reward[[s, a, b]];
                if !(0.0..=1.0).contains(&r) {
                    out.push(Violation::RewardRange { state: s, victim_action: a, attacker_action: b, value: r });
                }
            }
        }
    }
    let mut sum = 0.0;
    for (s, &p) in g.rho.iter().enumerate() {
        if !(p >= 0.0) {
            out.push(Violation::NegativeInitial { state: s, value: p });
        }
        sum += p;
    }
    if !((sum - 1.0).abs() <= tol.stochastic) {
        out.push(Violation::InitialDistribution { sum });
    }
    if !(0.0..=MAX_DISCOUNT).contains(&g.gamma) {
        out.push(Violation::Discount { gamma: g.gamma });
    }
    out
}
