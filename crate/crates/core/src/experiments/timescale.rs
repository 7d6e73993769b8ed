//! Paired two-timescale runs over a seed list and a κ grid, each compared
//! with κ = 1 and with a min-oracle reference on the same game.

use std::path::Path;

use rayon::prelude::*;

use crate::error::Result;
use crate::experiments::{num, streams, write_table, Check, ExperimentConfig};
use crate::sampling::child_seed;
use crate::training::{run, train_two_timescale_with, Method, RunOptions, TrainingTrace};

pub const TIMESCALE_HEADER: [&str; 12] = [
    "seed",
    "kappa",
    "average_expl",
    "average_expl_raw",
    "final_expl",
    "best_expl",
    "final_grad_norm",
    "kappa1_average_expl",
    "below_kappa1",
    "min_oracle_average_expl",
    "gap_to_min_oracle",
    "within_delta",
];

/// Share of seeds on which κ > 1 must beat κ = 1.
pub const BELOW_KAPPA1_SHARE: f64 = 0.9;
/// Share of seeds on which κ > 1 must land within δ of the min oracle.
pub const WITHIN_DELTA_SHARE: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct TimescaleRow {
    pub seed: u64,
    pub kappa: f64,
    pub average_expl: f64,
    pub average_expl_raw: f64,
    pub final_expl: f64,
    pub best_expl: f64,
    pub final_grad_norm: f64,
    pub kappa1_average_expl: f64,
    pub below_kappa1: bool,
    pub min_oracle_average_expl: f64,
    /// Raw-unit difference to the min-oracle average.
    pub gap_to_min_oracle: f64,
    pub within_delta: bool,
}

impl TimescaleRow {
    fn row(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            num(self.kappa),
            num(self.average_expl),
            num(self.average_expl_raw),
            num(self.final_expl),
            num(self.best_expl),
            num(self.final_grad_norm),
            num(self.kappa1_average_expl),
            self.below_kappa1.to_string(),
            num(self.min_oracle_average_expl),
            num(self.gap_to_min_oracle),
            self.within_delta.to_string(),
        ]
    }
}

/// Traces for one seed: the min-oracle reference, κ = 1, then `kappas`.
#[derive(Debug, Clone)]
pub struct SeedRuns {
    pub seed: u64,
    pub min_oracle: TrainingTrace,
    pub kappa1: TrainingTrace,
    pub runs: Vec<(f64, TrainingTrace)>,
}

#[derive(Debug, Clone)]
pub struct TimescaleStudy {
    pub rows: Vec<TimescaleRow>,
    pub seeds: Vec<SeedRuns>,
}

impl TimescaleStudy {
    pub fn rows_for_kappa(&self, kappa: f64) -> impl Iterator<Item = &TimescaleRow> {
        self.rows.iter().filter(move |r| r.kappa == kappa)
    }

    /// For every κ > 1: strictly below κ = 1 on at least 90% of seeds and
    /// within δ of the min oracle on at least 80%.
    pub fn checks(&self) -> Vec<Check> {
        let mut kappas: Vec<f64> = self.rows.iter().map(|r| r.kappa).filter(|&k| k > 1.0).collect();
        kappas.sort_by(f64::total_cmp);
        kappas.dedup();
        let mut out = Vec::new();
        for k in kappas {
            let rows: Vec<&TimescaleRow> = self.rows_for_kappa(k).collect();
            let n = rows.len() as f64;
            let below = rows.iter().filter(|r| r.below_kappa1).count();
            let within = rows.iter().filter(|r| r.within_delta).count();
            out.push(Check::required(
                "below_kappa1",
                below as f64 >= (BELOW_KAPPA1_SHARE * n).ceil(),
                format!("kappa={k} seeds={below}/{}", rows.len()),
            ));
            out.push(Check::required(
                "within_delta_of_min_oracle",
                within as f64 >= (WITHIN_DELTA_SHARE * n).ceil(),
                format!("kappa={k} seeds={within}/{}", rows.len()),
            ));
        }
        out
    }

    /// `summary.csv` plus `traces/seed<s>_<run>.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let traces = dir.join("traces");
        std::fs::create_dir_all(&traces)?;
        for s in &self.seeds {
            s.min_oracle.save(traces.join(format!("seed{}_min_oracle.csv", s.seed)))?;
            s.kappa1.save(traces.join(format!("seed{}_k1.csv", s.seed)))?;
            for (k, t) in &s.runs {
                t.save(traces.join(format!("seed{}_k{k}.csv", s.seed)))?;
            }
        }
        let rows: Vec<Vec<String>> = self.rows.iter().map(TimescaleRow::row).collect();
        write_table(&dir.join("summary.csv"), &TIMESCALE_HEADER, &rows)
    }
}

fn seed_runs(config: &ExperimentConfig, seed: u64) -> Result<(SeedRuns, Vec<TimescaleRow>)> {
    let g = config.game.load(seed)?;
    let benign = config.benign_for(&g, seed)?;
    let train_seed = child_seed(config.root_seed, streams::TRAINING, seed);
    let opts = RunOptions { tol: config.tolerances.best_response, ..RunOptions::default() };
    let min_oracle = run(&g, &benign, config.eps, Method::GaMin, &config.schedule.with_kappa(1.0)?, train_seed, &opts)?;
    let two = |k: f64| -> Result<TrainingTrace> {
        train_two_timescale_with(&g, &benign, config.eps, &config.schedule.with_kappa(k)?, train_seed, &opts)
    };
    let kappa1 = two(1.0)?;
    let runs = config.kappas.iter().map(|&k| Ok((k, if k == 1.0 { kappa1.clone() } else { two(k)? }))).collect::<Result<Vec<_>>>()?;
    let reference = min_oracle.raw_exploitability(min_oracle.average_exploitability());
    let rows = runs
        .iter()
        .map(|(k, t)| {
            let avg = t.average_exploitability();
            let avg_raw = t.raw_exploitability(avg);
            let gap = avg_raw - reference;
            TimescaleRow {
                seed,
                kappa: *k,
                average_expl: avg,
                average_expl_raw: avg_raw,
                final_expl: t.final_record().exploitability,
                best_expl: t.best_exploitability(),
                final_grad_norm: t.final_record().grad_norm_victim,
                kappa1_average_expl: kappa1.average_exploitability(),
                below_kappa1: avg < kappa1.average_exploitability(),
                min_oracle_average_expl: min_oracle.average_exploitability(),
                gap_to_min_oracle: gap,
                within_delta: gap.abs() <= config.delta,
            }
        })
        .collect();
    Ok((SeedRuns { seed, min_oracle, kappa1, runs }, rows))
}

/// Seeds run in parallel; rows are assembled in seed order.
pub fn run_timescale_study(config: &ExperimentConfig) -> Result<TimescaleStudy> {
    config.validate()?;
    let per_seed: Vec<Result<(SeedRuns, Vec<TimescaleRow>)>> =
        config.seeds.par_iter().map(|&s| seed_runs(config, s)).collect();
    let mut seeds = Vec::new();
    let mut rows = Vec::new();
    for r in per_seed {
        let (s, rs) = r?;
        seeds.push(s);
        rows.extend(rs);
    }
    Ok(TimescaleStudy { rows, seeds })
}
