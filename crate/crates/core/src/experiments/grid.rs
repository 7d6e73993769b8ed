//! Defense-budget by attack-budget grid of attacker scores.

use std::path::Path;

use rayon::prelude::*;

use crate::error::Result;
use crate::experiments::{num, streams, write_table, Check, ExperimentConfig};
use crate::game::{value, Policy};
use crate::sampling::child_seed;
use crate::training::{best_response_victim, exploitability, train_two_timescale_with, RunOptions};

pub const GRID_HEADER: [&str; 5] = ["seed", "defense", "attack_eps", "score", "score_raw"];

/// Slack allowed by the structural checks.
const CHECK_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Defense {
    /// Victim is the best response to the benign attacker.
    None,
    /// Best iterate of two-timescale training at this budget.
    Trained(f64),
}

impl Defense {
    pub fn label(self) -> String {
        match self {
            Defense::None => "none".into(),
            Defense::Trained(e) => num(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub seed: u64,
    pub defense: Defense,
    pub attack_eps: f64,
    /// Exploitability of the defended victim at `attack_eps`.
    pub score: f64,
    pub score_raw: f64,
}

#[derive(Debug, Clone)]
pub struct BudgetGrid {
    pub cells: Vec<GridCell>,
    pub checks: Vec<Check>,
}

impl BudgetGrid {
    pub fn score(&self, seed: u64, defense: Defense, attack_eps: f64) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.seed == seed && c.defense == defense && c.attack_eps == attack_eps)
            .map(|c| c.score)
    }

    pub fn all_required_pass(&self) -> bool {
        Check::all_required_pass(&self.checks)
    }

    /// `grid.csv` in long format and `checks.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .cells
            .iter()
            .map(|c| vec![c.seed.to_string(), c.defense.label(), num(c.attack_eps), num(c.score), num(c.score_raw)])
            .collect();
        write_table(&dir.join("grid.csv"), &GRID_HEADER, &rows)?;
        Check::write_all(&self.checks, &dir.join("checks.csv"))
    }
}

fn seed_grid(config: &ExperimentConfig, seed: u64) -> Result<(Vec<GridCell>, Vec<Check>)> {
    let g = config.game.load(seed)?;
    let benign = config.benign_for(&g, seed)?;
    let tol = config.tolerances.best_response;
    let train_seed = child_seed(config.root_seed, streams::TRAINING, seed);
    let opts = RunOptions { tol, ..RunOptions::default() };
    let schedule = config.schedule.with_kappa(config.schedule.kappa)?;

    let mut victims: Vec<(Defense, Policy)> = Vec::new();
    let anything = Policy::uniform(g.n_states(), g.n_actions_attacker());
    victims.push((Defense::None, best_response_victim(&g, &benign, 0.0, &anything, tol)?.0));
    for &e in &config.eps_grid {
        let t = train_two_timescale_with(&g, &benign, e, &schedule, train_seed, &opts)?;
        victims.push((Defense::Trained(e), t.best_victim().clone()));
    }

    let mut cells = Vec::new();
    for (d, v) in &victims {
        for &a in &config.attack_eps_grid {
            let score = exploitability(&g, v, &benign, a, tol)?;
            cells.push(GridCell { seed, defense: *d, attack_eps: a, score, score_raw: g.raw_exploitability(score) });
        }
    }
    let at = |d: Defense, a: f64| cells.iter().find(|c| c.defense == d && c.attack_eps == a).expect("cell").score;

    let mut checks = Vec::new();
    let mut sorted_attacks = config.attack_eps_grid.clone();
    sorted_attacks.sort_by(f64::total_cmp);
    for (d, v) in &victims {
        let scores: Vec<f64> = sorted_attacks.iter().map(|&a| at(*d, a)).collect();
        let monotone = scores.windows(2).all(|w| w[1] >= w[0] - CHECK_MARGIN);
        checks.push(Check::required("monotone_in_attack", monotone, format!("seed={seed},defense={}", d.label())));
        if sorted_attacks.contains(&0.0) {
            let expect = -value(&g, v, &benign)?;
            let got = at(*d, 0.0);
            checks.push(Check::required(
                "zero_attack_is_benign_value",
                (got - expect).abs() <= CHECK_MARGIN,
                format!("seed={seed},defense={},score={got},expected={expect}", d.label()),
            ));
        }
    }
    for &a in sorted_attacks.iter().filter(|&&a| a > 0.0) {
        let none = at(Defense::None, a);
        for &e in &config.eps_grid {
            let s = at(Defense::Trained(e), a);
            checks.push(Check::required(
                "defended_below_none",
                s <= none + CHECK_MARGIN,
                format!("seed={seed},defense={},attack_eps={a},score={s},none={none}", num(e)),
            ));
        }
        if config.eps_grid.contains(&a) {
            let diag = at(Defense::Trained(a), a);
            let col_min = config.eps_grid.iter().map(|&e| at(Defense::Trained(e), a)).fold(f64::INFINITY, f64::min);
            checks.push(Check::informational(
                "diagonal_is_column_min",
                diag <= col_min + config.delta,
                format!("seed={seed},attack_eps={a},diagonal={diag},column_min={col_min}"),
            ));
        }
    }
    Ok((cells, checks))
}

/// Cells for every seed in `config.seeds`: a no-defense row plus one row per
/// defense budget in `config.eps_grid`, scored at each `config.attack_eps_grid`.
pub fn run_budget_grid(config: &ExperimentConfig) -> Result<BudgetGrid> {
    config.validate()?;
    let per_seed: Vec<Result<(Vec<GridCell>, Vec<Check>)>> =
        config.seeds.par_iter().map(|&s| seed_grid(config, s)).collect();
    let mut cells = Vec::new();
    let mut checks = Vec::new();
    for r in per_seed {
        let (c, k) = r?;
        cells.extend(c);
        checks.extend(k);
    }
    Ok(BudgetGrid { cells, checks })
}
