//! Experiment definitions and their analyses.
//!
//! Every experiment is a list of [`Variant`]s, each run for the same number of
//! repeats. Repeat `r` of every variant is seeded with
//! `derive_seed(base_seed, r)`, so variants see common random numbers and any
//! single repeat can be reproduced on its own.

mod evolvable;
mod exp1;
mod exp2;
mod sweep;

use std::fmt;

use morphogen_core::{derive_seed, run_evolution, EvolutionConfig, RunResult};
use serde::Serialize;

use crate::error::Result;
use crate::pool::run_indexed;

pub use evolvable::{
    correlation_bins, run_evolvable, stable_competency, CorrelationBin, EvolvableReport,
    EXP4_PENALTY_WEIGHT,
};
pub use exp1::{
    median_crossings, run_exp1, Exp1Report, TTestRow, ThresholdRow, EXP1_LEVELS, EXP1_THRESHOLDS,
    TTEST_GENERATIONS,
};
pub use exp2::{
    domination_generation, run_exp2, DominationCell, Exp2Report, EXP2_FRACTIONS, EXP2_LEVELS,
};
pub use sweep::{linspace, run_sweep, SweepPoint, SweepReport, SweepSpec, SWEEP_RANGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Exp1,
    Exp2,
    Exp3,
    Exp4,
    Sweep,
    Run,
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExperimentId::Exp1 => "exp1",
            ExperimentId::Exp2 => "exp2",
            ExperimentId::Exp3 => "exp3",
            ExperimentId::Exp4 => "exp4",
            ExperimentId::Sweep => "sweep",
            ExperimentId::Run => "run",
        };
        f.write_str(s)
    }
}

/// One labelled configuration within an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variant {
    pub label: String,
    pub config: EvolutionConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub base_config: EvolutionConfig,
    pub repeats: u32,
    pub base_seed: u64,
    pub variants: Vec<Variant>,
}

impl ExperimentSpec {
    pub fn seeds(&self) -> Vec<u64> {
        (0..u64::from(self.repeats))
            .map(|r| derive_seed(self.base_seed, r))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(crate::LabError::Config("repeats must be positive".into()));
        }
        for v in &self.variants {
            v.config.validate()?;
        }
        Ok(())
    }
}

/// All repeats of one variant, in repeat order.
#[derive(Debug, Clone)]
pub struct VariantRuns {
    pub label: String,
    pub config: EvolutionConfig,
    pub runs: Vec<RunResult>,
}

/// Runs every variant × repeat on `jobs` threads.
pub fn run_spec(spec: &ExperimentSpec, jobs: usize) -> Result<Vec<VariantRuns>> {
    spec.validate()?;
    let repeats = spec.repeats as usize;
    let seeds = spec.seeds();
    let results = run_indexed(jobs, spec.variants.len() * repeats, |i| {
        let (v, r) = (i / repeats, i % repeats);
        let config = EvolutionConfig {
            seed: seeds[r],
            ..spec.variants[v].config.clone()
        };
        run_evolution(&config)
    })?;

    let mut results = results.into_iter();
    spec.variants
        .iter()
        .map(|variant| {
            let runs = results
                .by_ref()
                .take(repeats)
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(VariantRuns {
                label: variant.label.clone(),
                config: variant.config.clone(),
                runs,
            })
        })
        .collect()
}

/// `runs[r][g]` for a per-generation field, truncated to the shortest run.
pub(crate) fn matrix(
    runs: &[RunResult],
    f: impl Fn(&morphogen_core::GenerationRecord) -> f64,
) -> Vec<Vec<f64>> {
    let len = runs.iter().map(|r| r.records.len()).min().unwrap_or(0);
    runs.iter()
        .map(|r| r.records[..len].iter().map(&f).collect())
        .collect()
}

/// Column means of a repeat × generation matrix.
pub fn mean_series(rows: &[Vec<f64>]) -> Vec<f64> {
    let len = rows.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|g| rows.iter().map(|r| r[g]).sum::<f64>() / rows.len() as f64)
        .collect()
}
