//! Experiment configuration documents and key-path overrides.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::experiments::random_game::{generate_random_game, random_benign_policy, RandomGameSpec};
use crate::experiments::rps::builtin_rps;
use crate::game::{MarkovGame, Policy, Tolerances};
use crate::training::{Decay, LearningSchedule, DEFAULT_TOLERANCE};

/// Environment variable that overrides `root_seed`.
pub const SEED_ENV: &str = "COUPLED_GAMES_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    #[default]
    RpsBenchmark,
    TimescaleStudy,
    BudgetGrid,
    CertifyBounds,
    Attack,
}

/// `"builtin:rps"`, a path to a game document, or `{"random": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameSource {
    Named(String),
    Random { random: RandomGameSpec },
}

impl Default for GameSource {
    fn default() -> Self {
        GameSource::Named("builtin:rps".into())
    }
}

impl GameSource {
    pub fn random_spec(&self) -> Option<&RandomGameSpec> {
        match self {
            GameSource::Random { random } => Some(random),
            GameSource::Named(_) => None,
        }
    }

    /// Builds the game; `seed` selects the instance for random sources.
    pub fn load(&self, seed: u64) -> Result<MarkovGame> {
        match self {
            GameSource::Named(name) if name == "builtin:rps" => Ok(builtin_rps()),
            GameSource::Named(name) if name.starts_with("builtin:") => {
                Err(Error::Config(format!("unknown built-in game `{name}`")))
            }
            GameSource::Named(path) => MarkovGame::load(path),
            GameSource::Random { random } => generate_random_game(random, seed),
        }
    }

    /// Benign attacker policy: seeded for random games, uniform otherwise.
    pub fn benign(&self, g: &MarkovGame, seed: u64) -> Policy {
        match self {
            GameSource::Random { random } => random_benign_policy(random, seed),
            GameSource::Named(_) => Policy::uniform(g.n_states(), g.n_actions_attacker()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScheduleConfig {
    pub eta_victim: f64,
    /// Attacker rate as a multiple of `eta_victim` for baselines and
    /// single-κ runs.
    pub kappa: f64,
    pub iterations: usize,
    pub decay: Decay,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { eta_victim: 0.01, kappa: 32.0, iterations: 5000, decay: Decay::Constant }
    }
}

impl ScheduleConfig {
    pub fn with_kappa(&self, kappa: f64) -> Result<LearningSchedule> {
        Ok(LearningSchedule::new(self.eta_victim, kappa * self.eta_victim, self.iterations)?.with_decay(self.decay))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    pub best_response: f64,
    pub stochastic: f64,
    pub solve: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            best_response: DEFAULT_TOLERANCE,
            stochastic: Tolerances::DEFAULT.stochastic,
            solve: Tolerances::DEFAULT.solve,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertificationConfig {
    /// Random games per bound.
    pub instances: usize,
    pub max_states: usize,
    pub max_actions: usize,
    pub gammas: Vec<f64>,
    /// Point pairs per game class for the Lipschitz and smoothness probes.
    pub probe_pairs: usize,
    /// Run the gradient-domination probe where enumeration of the mismatch
    /// coefficient costs at most this many joint evaluations (0 disables it).
    pub domination_max_pairs: u64,
}

impl Default for CertificationConfig {
    fn default() -> Self {
        CertificationConfig {
            instances: 200,
            max_states: 6,
            max_actions: 4,
            gammas: vec![0.5, 0.9, 0.99],
            probe_pairs: 100,
            domination_max_pairs: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub game: GameSource,
    /// Budget used for training and for single-budget evaluations.
    pub eps: f64,
    /// Budgets for bound certification and for the defence axis of the grid.
    pub eps_grid: Vec<f64>,
    /// Attack budgets of the grid.
    pub attack_eps_grid: Vec<f64>,
    pub schedule: ScheduleConfig,
    /// Timescale ratios for two-timescale runs.
    pub kappas: Vec<f64>,
    /// Game seeds for random-game suites.
    pub seeds: Vec<u64>,
    /// Gap allowed between two-timescale and min-oracle averages.
    pub delta: f64,
    pub tolerances: ToleranceConfig,
    pub certification: CertificationConfig,
    /// Victim policy file for `attack`.
    pub victim_policy: Option<PathBuf>,
    /// Benign policy file; defaults to the game source's benign policy.
    pub benign_policy: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub root_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::default(),
            game: GameSource::default(),
            eps: 1.0,
            eps_grid: vec![0.0, 0.1, 0.3, 0.7, 1.0],
            attack_eps_grid: vec![0.0, 0.3, 0.7, 1.0],
            schedule: ScheduleConfig::default(),
            kappas: vec![1.0, 32.0],
            seeds: (0..10).collect(),
            delta: 0.05,
            tolerances: ToleranceConfig::default(),
            certification: CertificationConfig::default(),
            victim_policy: None,
            benign_policy: None,
            output_dir: PathBuf::from("out"),
            root_seed: 0,
        }
    }
}

/// Sets `key.path` in a JSON document. The value is parsed as JSON when
/// possible and taken as a string otherwise.
pub fn apply_override(doc: &mut Value, path: &str, raw: &str) -> Result<()> {
    let parsed = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = doc;
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("malformed key path `{path}`")));
    }
    for (i, key) in keys.iter().enumerate() {
        if !cur.is_object() {
            *cur = Value::Object(Default::default());
        }
        let map = cur.as_object_mut().expect("just ensured");
        if i + 1 == keys.len() {
            map.insert(key.to_string(), parsed);
            return Ok(());
        }
        cur = map.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_with_overrides(text, &[])
    }

    /// Parses a config document after applying `(key.path, value)` overrides.
    pub fn from_json_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut doc: Value = if text.trim().is_empty() { Value::Object(Default::default()) } else { serde_json::from_str(text)? };
        for (k, v) in overrides {
            apply_override(&mut doc, k, v)?;
        }
        let cfg: ExperimentConfig = serde_json::from_value(doc)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialize")
    }

    /// Replaces `root_seed` with the environment override, if set.
    pub fn apply_seed_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.root_seed = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}={v} is not an unsigned integer")))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for &e in std::iter::once(&self.eps).chain(&self.eps_grid).chain(&self.attack_eps_grid) {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidBudget(e));
            }
        }
        if self.schedule.iterations == 0 {
            return Err(Error::Config("schedule.iterations must be at least 1".into()));
        }
        if !(self.schedule.eta_victim > 0.0 && self.schedule.eta_victim.is_finite()) {
            return Err(Error::Config("schedule.eta_victim must be positive".into()));
        }
        if self.kappas.iter().chain(std::iter::once(&self.schedule.kappa)).any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(Error::Config("timescale ratios must be positive".into()));
        }
        for tol in [self.tolerances.best_response, self.tolerances.stochastic, self.tolerances.solve] {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::InvalidTolerance(tol));
            }
        }
        if let Some(spec) = self.game.random_spec() {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn benign_for(&self, g: &MarkovGame, seed: u64) -> Result<Policy> {
        match &self.benign_policy {
            Some(p) => {
                let pol = Policy::load(p)?;
                g.check_attacker(&pol)?;
                Ok(pol)
            }
            None => Ok(self.game.benign(g, seed)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.seeds.len(), 10);
        assert_eq!(c.schedule.eta_victim, 0.01);
        assert_eq!(c.schedule.kappa, 32.0);
    }

    #[test]
    fn overrides_follow_key_paths() {
        let ov = vec![
            ("schedule.iterations".to_string(), "7".to_string()),
            ("game.random.n_states".to_string(), "4".to_string()),
            ("output_dir".to_string(), "/tmp/x".to_string()),
            ("eps_grid".to_string(), "[0.5]".to_string()),
        ];
        let c = ExperimentConfig::from_json_with_overrides(r#"{"game": {"random": {}}}"#, &ov).unwrap();
        assert_eq!(c.schedule.iterations, 7);
        assert_eq!(c.game.random_spec().unwrap().n_states, 4);
        assert_eq!(c.output_dir, PathBuf::from("/tmp/x"));
        assert_eq!(c.eps_grid, vec![0.5]);
    }

    #[test]
    fn game_sources_parse() {
        let c = ExperimentConfig::from_json(r#"{"game": "builtin:rps"}"#).unwrap();
        assert_eq!(c.game.load(0).unwrap().n_actions_victim(), 3);
        let c = ExperimentConfig::from_json(r#"{"game": "builtin:chess"}"#).unwrap();
        assert!(c.game.load(0).is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(matches!(ExperimentConfig::from_json(r#"{"eps": 1.5}"#), Err(Error::InvalidBudget(_))));
        assert!(ExperimentConfig::from_json(r#"{"schedule": {"iterations": 0}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"tolerances": {"best_response": 0}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "nope"}"#).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }
}
