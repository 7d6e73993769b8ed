//! Adversarial training with a min oracle, with two timescales, and the
//! single-timescale baselines.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::{policy_mix, MarkovGame, Policy};
use crate::gradients::{gradients_raw, projected_step, JointGradient};
use crate::sampling::{random_policy, seeded};
use crate::training::best_response::{check_tolerance, Coupling, DEFAULT_TOLERANCE};
use crate::training::{IterationRecord, LearningSchedule, TrainingTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Simultaneous projected gradient descent-ascent.
    Sgda,
    /// Attacker steps first, victim steps against the updated attacker.
    Agda,
    /// Simultaneous best responses.
    Sibr,
    /// Attacker best-responds, then the victim best-responds to it.
    Aibr,
    /// Victim gradient ascent against an exact attacker best response.
    GaMin,
    /// Simultaneous projected steps with separate rates.
    TwoTimescale,
}

impl Method {
    pub const BASELINES: [Method; 5] = [Method::Sgda, Method::Agda, Method::Sibr, Method::Aibr, Method::GaMin];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Sgda => "SGDA",
            Method::Agda => "AGDA",
            Method::Sibr => "SIBR",
            Method::Aibr => "AIBR",
            Method::GaMin => "GAMin",
            Method::TwoTimescale => "TwoTimescale",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "sgda" => Ok(Method::Sgda),
            "agda" => Ok(Method::Agda),
            "sibr" => Ok(Method::Sibr),
            "aibr" => Ok(Method::Aibr),
            "gamin" | "minoracle" => Ok(Method::GaMin),
            "twotimescale" => Ok(Method::TwoTimescale),
            _ => Err(Error::UnknownMethod(s.to_string())),
        }
    }
}

/// Starting point for one agent.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Uniform,
    /// Rows drawn from a symmetric Dirichlet using the run's seed.
    Random { concentration: f64 },
    Given(Policy),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Best-response accuracy.
    pub tol: f64,
    pub victim_init: Init,
    /// Initial adversarial component.
    pub attacker_init: Init,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tol: DEFAULT_TOLERANCE,
            victim_init: Init::Uniform,
            attacker_init: Init::Random { concentration: 1.0 },
        }
    }
}

fn initial(init: &Init, ns: usize, na: usize, rng: &mut crate::sampling::SeededRng) -> Result<Policy> {
    match init {
        Init::Uniform => Ok(Policy::uniform(ns, na)),
        Init::Random { concentration } => {
            if !(*concentration > 0.0 && concentration.is_finite()) {
                return Err(Error::Config(format!("concentration {concentration} must be positive")));
            }
            Ok(random_policy(rng, ns, na, *concentration))
        }
        Init::Given(p) => {
            if p.n_states() != ns || p.n_actions() != na {
                return Err(Error::Dimension(format!(
                    "initial policy is {}x{}, expected {ns}x{na}",
                    p.n_states(),
                    p.n_actions()
                )));
            }
            Ok(p.clone())
        }
    }
}

fn joint(c: &Coupling, g: &MarkovGame, victim: &Policy, adversarial: &Policy) -> Result<JointGradient> {
    let mix = policy_mix(c.benign.view(), adversarial.view(), c.eps);
    gradients_raw(g, victim.view(), mix.view(), c.eps)
}

fn frobenius(m: &ndarray::Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Runs `method` for `schedule.iterations` steps.
pub fn run(
    g: &MarkovGame,
    benign: &Policy,
    eps: f64,
    method: Method,
    schedule: &LearningSchedule,
    seed: u64,
    opts: &RunOptions,
) -> Result<TrainingTrace> {
    g.ensure_valid()?;
    g.check_attacker(benign)?;
    schedule.validate()?;
    check_tolerance(opts.tol)?;
    let c = Coupling::new(g, benign, eps)?;
    let (ns, na, nb) = (g.n_states(), g.n_actions_victim(), g.n_actions_attacker());
    let mut rng = seeded(seed);
    let mut victim = initial(&opts.victim_init, ns, na, &mut rng)?;
    let mut adversarial = initial(&opts.attacker_init, ns, nb, &mut rng)?;
    let mut records = Vec::with_capacity(schedule.iterations);

    for t in 0..schedule.iterations {
        let eta_v = schedule.eta_victim_at(t);
        let eta_a = schedule.eta_attacker_at(t);
        let (br, br_value) = c.attacker_best_response(&victim, opts.tol)?;
        if method == Method::GaMin {
            adversarial = br.clone();
        }
        let jg = joint(&c, g, &victim, &adversarial)?;
        records.push(IterationRecord {
            iter: t,
            victim: victim.clone(),
            attacker: adversarial.clone(),
            value: jg.value,
            grad_norm_victim: frobenius(&jg.victim),
            exploitability: -br_value,
            eta_victim: eta_v,
            eta_attacker: eta_a,
        });
        match method {
            Method::GaMin => {
                victim = projected_step(&victim, &jg.victim, eta_v)?;
            }
            Method::Sgda | Method::TwoTimescale => {
                let next_victim = projected_step(&victim, &jg.victim, eta_v)?;
                adversarial = projected_step(&adversarial, &jg.attacker, -eta_a)?;
                victim = next_victim;
            }
            Method::Agda => {
                adversarial = projected_step(&adversarial, &jg.attacker, -eta_a)?;
                let after = joint(&c, g, &victim, &adversarial)?;
                victim = projected_step(&victim, &after.victim, eta_v)?;
            }
            Method::Sibr => {
                let (next_victim, _) = c.victim_best_response(&adversarial, opts.tol)?;
                adversarial = br;
                victim = next_victim;
            }
            Method::Aibr => {
                adversarial = br;
                victim = c.victim_best_response(&adversarial, opts.tol)?.0;
            }
        }
    }
    Ok(TrainingTrace::finish(method, g, records, &mut rng))
}

/// Algorithm with a min oracle: the attacker plays an exact best response
/// and the victim takes a projected gradient step against it.
pub fn train_min_oracle(
    g: &MarkovGame,
    benign: &Policy,
    eps: f64,
    schedule: &LearningSchedule,
    seed: u64,
) -> Result<TrainingTrace> {
    run(g, benign, eps, Method::GaMin, schedule, seed, &RunOptions::default())
}

/// Simultaneous projected steps, attacker descending at `η_α ≥ η_ν`.
pub fn train_two_timescale(
    g: &MarkovGame,
    benign: &Policy,
    eps: f64,
    schedule: &LearningSchedule,
    seed: u64,
) -> Result<TrainingTrace> {
    train_two_timescale_with(g, benign, eps, schedule, seed, &RunOptions::default())
}

pub fn train_two_timescale_with(
    g: &MarkovGame,
    benign: &Policy,
    eps: f64,
    schedule: &LearningSchedule,
    seed: u64,
    opts: &RunOptions,
) -> Result<TrainingTrace> {
    schedule.validate()?;
    if schedule.kappa() < 1.0 {
        return Err(Error::InvalidSchedule(format!(
            "two-timescale training needs eta_attacker >= eta_victim (kappa = {})",
            schedule.kappa()
        )));
    }
    run(g, benign, eps, Method::TwoTimescale, schedule, seed, opts)
}

pub fn baseline_dynamics(
    g: &MarkovGame,
    benign: &Policy,
    eps: f64,
    method: Method,
    schedule: &LearningSchedule,
    seed: u64,
) -> Result<TrainingTrace> {
    run(g, benign, eps, method, schedule, seed, &RunOptions::default())
}
