//! Optimal budgeted attack on a fixed victim policy.

use std::path::Path;

use crate::analysis::{tv_max, verify_value_bound, verify_visitation_bound, BoundReport};
use crate::error::{Error, Result};
use crate::experiments::{num, write_table, ExperimentConfig};
use crate::game::{state_visitation, value, CoupledPolicy, Policy};
use crate::training::best_response_attacker;

pub const ATTACK_HEADER: [&str; 9] = [
    "eps",
    "benign_value",
    "benign_value_raw",
    "attacked_value",
    "attacked_value_raw",
    "value_drop",
    "tv_max",
    "visitation_l1_shift",
    "checks_pass",
];

#[derive(Debug, Clone)]
pub struct AttackRow {
    pub eps: f64,
    pub benign_value: f64,
    pub benign_value_raw: f64,
    pub attacked_value: f64,
    pub attacked_value_raw: f64,
    pub tv_max: f64,
    pub visitation_l1_shift: f64,
    pub adversarial: Policy,
    /// Value and visitation bounds, and `tv_max ≤ ε`.
    pub checks: Vec<BoundReport>,
}

impl AttackRow {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone)]
pub struct AttackReport {
    pub rows: Vec<AttackRow>,
}

impl AttackReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(AttackRow::pass)
    }

    /// `attack.csv` and `attack_eps<ε>.policy.json` per budget.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    num(r.eps),
                    num(r.benign_value),
                    num(r.benign_value_raw),
                    num(r.attacked_value),
                    num(r.attacked_value_raw),
                    num(r.benign_value - r.attacked_value),
                    num(r.tv_max),
                    num(r.visitation_l1_shift),
                    r.pass().to_string(),
                ]
            })
            .collect();
        for r in &self.rows {
            r.adversarial.save(dir.join(format!("attack_eps{}.policy.json", num(r.eps))))?;
        }
        write_table(&dir.join("attack.csv"), &ATTACK_HEADER, &rows)
    }
}

/// Attacks `victim` at every budget of `config.attack_eps_grid`. The game
/// instance is the first entry of `config.seeds` (0 if empty).
pub fn run_attack(config: &ExperimentConfig, victim: &Policy) -> Result<AttackReport> {
    config.validate()?;
    let seed = config.seeds.first().copied().unwrap_or(0);
    let g = config.game.load(seed)?;
    g.ensure_valid()?;
    if victim.n_states() != g.n_states() || victim.n_actions() != g.n_actions_victim() {
        return Err(Error::Dimension(format!(
            "victim policy is {}x{}, game expects {}x{}",
            victim.n_states(),
            victim.n_actions(),
            g.n_states(),
            g.n_actions_victim()
        )));
    }
    let benign = config.benign_for(&g, seed)?;
    let base = value(&g, victim, &benign)?;
    let d0 = state_visitation(&g, victim, &benign)?;
    let mut rows = Vec::new();
    for &eps in &config.attack_eps_grid {
        let (adv, attacked) = best_response_attacker(&g, victim, &benign, eps, config.tolerances.best_response)?;
        let c = CoupledPolicy::new(benign.clone(), adv.clone(), eps)?;
        let realized = c.realized();
        let tv = tv_max(&realized, &benign)?;
        let shift = d0.l1_distance(&state_visitation(&g, victim, &realized)?);
        let inst = crate::analysis::Instance { game_seed: Some(seed), eps, detail: String::new() };
        let checks = vec![
            verify_value_bound(&g, victim, &c)?,
            verify_visitation_bound(&g, victim, &c)?,
            BoundReport::new("tv_budget", tv, eps, inst),
        ];
        rows.push(AttackRow {
            eps,
            benign_value: base,
            benign_value_raw: g.raw_value(base),
            attacked_value: attacked,
            attacked_value_raw: g.raw_value(attacked),
            tv_max: tv,
            visitation_l1_shift: shift,
            adversarial: adv,
            checks,
        });
    }
    Ok(AttackReport { rows })
}
