use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decay {
    /// `η^t = η`.
    #[default]
    Constant,
    /// `η^t = η / sqrt(t + 1)`.
    InverseSqrt,
}

impl Decay {
    fn factor(self, t: usize) -> f64 {
        match self {
            Decay::Constant => 1.0,
            Decay::InverseSqrt => 1.0 / ((t + 1) as f64).sqrt(),
        }
    }
}

/// Step sizes for both agents over `iterations` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningSchedule {
    pub eta_victim: f64,
    pub eta_attacker: f64,
    pub iterations: usize,
    #[serde(default)]
    pub decay: Decay,
}

impl LearningSchedule {
    pub fn new(eta_victim: f64, eta_attacker: f64, iterations: usize) -> Result<Self> {
        let s = LearningSchedule { eta_victim, eta_attacker, iterations, decay: Decay::Constant };
        s.validate()?;
        Ok(s)
    }

    /// Attacker rate `kappa * eta_victim`.
    pub fn two_timescale(eta_victim: f64, kappa: f64, iterations: usize) -> Result<Self> {
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(Error::InvalidSchedule(format!("timescale ratio {kappa} must be at least 1")));
        }
        Self::new(eta_victim, kappa * eta_victim, iterations)
    }

    pub fn with_decay(mut self, decay: Decay) -> Self {
        self.decay = decay;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, eta) in [("eta_victim", self.eta_victim), ("eta_attacker", self.eta_attacker)] {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::InvalidSchedule(format!("{name} = {eta} must be positive")));
            }
        }
        if self.iterations == 0 {
            return Err(Error::InvalidSchedule("iterations must be at least 1".into()));
        }
        Ok(())
    }

    /// `κ = η_α / η_ν`.
    pub fn kappa(&self) -> f64 {
        self.eta_attacker / self.eta_victim
    }

    pub fn eta_victim_at(&self, t: usize) -> f64 {
        self.eta_victim * self.decay.factor(t)
    }

    pub fn eta_attacker_at(&self, t: usize) -> f64 {
        self.eta_attacker * self.decay.factor(t)
    }
}
