//! Experiment drivers: game sources, the RPS benchmark, timescale studies,
//! the budget grid, bound certification and single-victim attacks.

mod attack;
mod certify;
pub mod config;
mod grid;
mod random_game;
mod rps;
mod rps_benchmark;
mod timescale;

use std::fs::{self, File};
use std::path::Path;

use crate::error::Result;

pub use attack::{run_attack, AttackReport, AttackRow, ATTACK_HEADER};
pub use certify::{run_bound_certification, Certification, CERTIFICATION_HEADER, INFORMATIONAL_BOUNDS};
pub use config::{
    apply_override, CertificationConfig, ExperimentConfig, ExperimentKind, GameSource, ScheduleConfig,
    ToleranceConfig, SEED_ENV,
};
pub use grid::{run_budget_grid, BudgetGrid, Defense, GridCell, GRID_HEADER};
pub use random_game::{generate_random_game, random_benign_policy, RandomGameSpec};
pub use rps::{builtin_rps, RPS_ACTIONS, RPS_PAYOFF, RPS_RESCALE};
pub use rps_benchmark::{
    run_rps_benchmark, MethodSummary, RpsBenchmark, BASELINE_TAIL_MEAN, MIN_ORACLE_BEST, MIN_ORACLE_TAIL_MAX, SUMMARY_HEADER,
    TAIL_WINDOW,
};
pub use timescale::{
    run_timescale_study, SeedRuns, TimescaleRow, TimescaleStudy, BELOW_KAPPA1_SHARE, TIMESCALE_HEADER, WITHIN_DELTA_SHARE,
};

/// Pass/fail outcome of one structural check of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Informational checks are reported but do not affect the exit status.
    pub required: bool,
    pub detail: String,
}

impl Check {
    pub fn required(name: &str, pass: bool, detail: String) -> Self {
        Check { name: name.into(), pass, required: true, detail }
    }

    pub fn informational(name: &str, pass: bool, detail: String) -> Self {
        Check { name: name.into(), pass, required: false, detail }
    }

    pub fn all_required_pass(checks: &[Check]) -> bool {
        checks.iter().filter(|c| c.required).all(|c| c.pass)
    }

    pub fn write_all(checks: &[Check], path: &Path) -> Result<()> {
        let rows: Vec<Vec<String>> = checks
            .iter()
            .map(|c| vec![c.name.clone(), c.pass.to_string(), c.required.to_string(), c.detail.clone()])
            .collect();
        write_table(path, &["check", "pass", "required", "detail"], &rows)
    }
}

/// Seed streams derived from the root seed.
pub(crate) mod streams {
    pub const TRAINING: u64 = 3;
    pub const CERTIFICATION: u64 = 4;
    pub const PROBES: u64 = 5;
}

/// Writes one CSV table, creating parent directories.
pub(crate) fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip decimal form, used for every float cell. Negative
/// zero is written as `0`.
pub(crate) fn num(x: f64) -> String {
    if x == 0.0 { "0".into() } else { x.to_string() }
}
