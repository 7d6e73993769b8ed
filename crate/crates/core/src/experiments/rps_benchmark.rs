//! All baselines plus two-timescale runs on one game, one trace per run.

use std::path::Path;

use rayon::prelude::*;

use crate::error::Result;
use crate::experiments::{num, write_table, Check, ExperimentConfig};
use crate::training::{run, train_two_timescale_with, LearningSchedule, Method, RunOptions, TrainingTrace};

/// Iterates summarised by the tail columns.
pub const TAIL_WINDOW: usize = 100;
/// Largest raw exploitability allowed over the min-oracle tail.
pub const MIN_ORACLE_TAIL_MAX: f64 = 0.05;
/// Largest raw best-iterate exploitability allowed for the min-oracle run.
pub const MIN_ORACLE_BEST: f64 = 0.01;
/// Smallest tail-mean raw exploitability expected from single-timescale baselines.
pub const BASELINE_TAIL_MEAN: f64 = 0.1;

pub const SUMMARY_HEADER: [&str; 11] = [
    "method",
    "kappa",
    "final_expl",
    "final_expl_raw",
    "average_expl",
    "average_expl_raw",
    "best_expl",
    "best_expl_raw",
    "tail_mean_expl_raw",
    "tail_max_expl_raw",
    "selected_iter",
];

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    /// File-safe run label, e.g. `SGDA` or `TwoTimescale_k64`.
    pub label: String,
    pub method: Method,
    pub kappa: f64,
    pub final_expl: f64,
    pub final_expl_raw: f64,
    pub average_expl: f64,
    pub average_expl_raw: f64,
    pub best_expl: f64,
    pub best_expl_raw: f64,
    pub tail_mean_expl_raw: f64,
    pub tail_max_expl_raw: f64,
    pub selected_iter: usize,
}

impl MethodSummary {
    fn from_trace(label: String, kappa: f64, t: &TrainingTrace) -> Self {
        let raw: Vec<f64> = t.exploitabilities().into_iter().map(|e| t.raw_exploitability(e)).collect();
        let tail = &raw[raw.len().saturating_sub(TAIL_WINDOW)..];
        MethodSummary {
            label,
            method: t.method(),
            kappa,
            final_expl: t.final_record().exploitability,
            final_expl_raw: *raw.last().expect("non-empty"),
            average_expl: t.average_exploitability(),
            average_expl_raw: t.raw_exploitability(t.average_exploitability()),
            best_expl: t.best_exploitability(),
            best_expl_raw: t.raw_exploitability(t.best_exploitability()),
            tail_mean_expl_raw: tail.iter().sum::<f64>() / tail.len() as f64,
            tail_max_expl_raw: tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            selected_iter: t.selected_index(),
        }
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.label.clone(),
            num(self.kappa),
            num(self.final_expl),
            num(self.final_expl_raw),
            num(self.average_expl),
            num(self.average_expl_raw),
            num(self.best_expl),
            num(self.best_expl_raw),
            num(self.tail_mean_expl_raw),
            num(self.tail_max_expl_raw),
            self.selected_iter.to_string(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct RpsBenchmark {
    pub traces: Vec<TrainingTrace>,
    pub summaries: Vec<MethodSummary>,
}

impl RpsBenchmark {
    pub fn summary(&self, label: &str) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.label == label)
    }

    /// Separation between the min-oracle run and the single-timescale
    /// baselines; two-timescale runs are compared with the min oracle for
    /// information only.
    pub fn checks(&self, delta: f64) -> Vec<Check> {
        let mut out = Vec::new();
        let Some(oracle) = self.summary(Method::GaMin.tag()) else { return out };
        out.push(Check::required(
            "min_oracle_tail_max",
            oracle.tail_max_expl_raw <= MIN_ORACLE_TAIL_MAX,
            format!("tail_max_expl_raw={} threshold={MIN_ORACLE_TAIL_MAX}", oracle.tail_max_expl_raw),
        ));
        out.push(Check::required(
            "min_oracle_best",
            oracle.best_expl_raw <= MIN_ORACLE_BEST,
            format!("best_expl_raw={} threshold={MIN_ORACLE_BEST}", oracle.best_expl_raw),
        ));
        for m in [Method::Sgda, Method::Agda, Method::Sibr, Method::Aibr] {
            if let Some(s) = self.summary(m.tag()) {
                out.push(Check::required(
                    "baseline_tail_mean",
                    s.tail_mean_expl_raw >= BASELINE_TAIL_MEAN,
                    format!("method={} tail_mean_expl_raw={} threshold={BASELINE_TAIL_MEAN}", s.label, s.tail_mean_expl_raw),
                ));
            }
        }
        for s in self.summaries.iter().filter(|s| s.method == Method::TwoTimescale) {
            let gap = s.average_expl_raw - oracle.average_expl_raw;
            out.push(Check::informational(
                "two_timescale_near_min_oracle",
                gap.abs() <= delta,
                format!("method={} average_gap_raw={gap} delta={delta}", s.label),
            ));
        }
        out
    }

    /// `trace_<label>.csv` (plus the selected policy) per run and `summary.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (t, s) in self.traces.iter().zip(&self.summaries) {
            t.save(dir.join(format!("trace_{}.csv", s.label)))?;
        }
        let rows: Vec<Vec<String>> = self.summaries.iter().map(MethodSummary::row).collect();
        write_table(&dir.join("summary.csv"), &SUMMARY_HEADER, &rows)
    }
}

/// Baselines run with `η_α = η_ν`; two-timescale runs use each of
/// `config.kappas`. Every run uses `config.root_seed`.
pub fn run_rps_benchmark(config: &ExperimentConfig) -> Result<RpsBenchmark> {
    config.validate()?;
    let g = config.game.load(config.root_seed)?;
    let benign = config.benign_for(&g, config.root_seed)?;
    let opts = RunOptions { tol: config.tolerances.best_response, ..RunOptions::default() };
    let mut jobs: Vec<(String, Method, f64)> = Method::BASELINES.iter().map(|m| (m.tag().to_string(), *m, 1.0)).collect();
    for &k in &config.kappas {
        jobs.push((format!("TwoTimescale_k{k}"), Method::TwoTimescale, k));
    }
    let results: Vec<Result<(TrainingTrace, MethodSummary)>> = jobs
        .into_par_iter()
        .map(|(label, method, kappa)| {
            let schedule: LearningSchedule = config.schedule.with_kappa(kappa)?;
            let trace = if method == Method::TwoTimescale {
                train_two_timescale_with(&g, &benign, config.eps, &schedule, config.root_seed, &opts)?
            } else {
                run(&g, &benign, config.eps, method, &schedule, config.root_seed, &opts)?
            };
            let summary = MethodSummary::from_trace(label, kappa, &trace);
            Ok((trace, summary))
        })
        .collect();
    let mut traces = Vec::new();
    let mut summaries = Vec::new();
    for r in results {
        let (t, s) = r?;
        traces.push(t);
        summaries.push(s);
    }
    Ok(RpsBenchmark { traces, summaries })
}
