use std::fs::File;
use std::io::Write;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::Result;
use crate::game::{MarkovGame, Policy, RewardRescale};
use crate::training::Method;

/// Column header of the trace CSV. Games with rescale metadata get
/// `J_raw,expl_raw` appended.
pub const TRACE_HEADER: [&str; 6] = ["iter", "J", "grad_norm_victim", "expl", "eta_v", "eta_a"];
pub const TRACE_RAW_COLUMNS: [&str; 2] = ["J_raw", "expl_raw"];

/// State of a run at iteration `iter`, before that iteration's update.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub victim: Policy,
    /// Adversarial component of the coupled attacker.
    pub attacker: Policy,
    pub value: f64,
    pub grad_norm_victim: f64,
    pub exploitability: f64,
    pub eta_victim: f64,
    pub eta_attacker: f64,
}

/// How the reported victim policy was chosen from the iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    /// Iterate `t` drawn with probability proportional to `η_ν^t`.
    StepWeightedDraw,
}

impl SelectionRule {
    pub fn tag(self) -> &'static str {
        match self {
            SelectionRule::StepWeightedDraw => "step_weighted_draw",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    method: Method,
    records: Vec<IterationRecord>,
    selection: SelectionRule,
    selected: usize,
    best: usize,
    weighted_average: f64,
    gamma: f64,
    rescale: Option<RewardRescale>,
}

impl TrainingTrace {
    pub(crate) fn finish(method: Method, g: &MarkovGame, records: Vec<IterationRecord>, rng: &mut impl Rng) -> Self {
        assert!(!records.is_empty(), "a run has at least one iteration");
        let weights: Vec<f64> = records.iter().map(|r| r.eta_victim).collect();
        let selected = WeightedIndex::new(&weights).expect("step sizes are positive").sample(rng);
        let total: f64 = weights.iter().sum();
        let weighted_average =
            records.iter().map(|r| r.eta_victim * r.exploitability).sum::<f64>() / total;
        let mut best = 0;
        for (i, r) in records.iter().enumerate() {
            if r.exploitability < records[best].exploitability {
                best = i;
            }
        }
        TrainingTrace {
            method,
            records,
            selection: SelectionRule::StepWeightedDraw,
            selected,
            best,
            weighted_average,
            gamma: g.gamma(),
            rescale: g.rescale(),
        }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn selection_rule(&self) -> SelectionRule {
        self.selection
    }

    pub fn selected_index(&self) -> usize {
        self.selected
    }

    pub fn selected_victim(&self) -> &Policy {
        &self.records[self.selected].victim
    }

    /// Step-weighted average of the exploitability over all iterates.
    pub fn average_exploitability(&self) -> f64 {
        self.weighted_average
    }

    /// First iterate with the lowest exploitability.
    pub fn best_index(&self) -> usize {
        self.best
    }

    pub fn best_victim(&self) -> &Policy {
        &self.records[self.best].victim
    }

    pub fn best_exploitability(&self) -> f64 {
        self.records[self.best].exploitability
    }

    pub fn final_record(&self) -> &IterationRecord {
        self.records.last().expect("non-empty")
    }

    pub fn exploitabilities(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.exploitability).collect()
    }

    pub fn rescale(&self) -> Option<RewardRescale> {
        self.rescale
    }

    /// Exploitability in raw reward units (unchanged without rescale metadata).
    pub fn raw_exploitability(&self, scaled: f64) -> f64 {
        self.rescale.map_or(scaled, |r| r.raw_exploitability(scaled, self.gamma))
    }

    pub fn raw_value(&self, scaled: f64) -> f64 {
        self.rescale.map_or(scaled, |r| r.raw_value(scaled, self.gamma))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = TRACE_HEADER.to_vec();
        if self.rescale.is_some() {
            header.extend(TRACE_RAW_COLUMNS);
        }
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![
                r.iter.to_string(),
                r.value.to_string(),
                r.grad_norm_victim.to_string(),
                r.exploitability.to_string(),
                r.eta_victim.to_string(),
                r.eta_attacker.to_string(),
            ];
            if self.rescale.is_some() {
                row.push(self.raw_value(r.value).to_string());
                row.push(self.raw_exploitability(r.exploitability).to_string());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the trace CSV and the selected victim policy next to it
    /// (`<stem>.policy.json`).
    pub fn save(&self, csv_path: impl AsRef<Path>) -> Result<()> {
        let csv_path = csv_path.as_ref();
        self.write_csv(File::create(csv_path)?)?;
        self.selected_victim().save(csv_path.with_extension("policy.json"))
    }
}
