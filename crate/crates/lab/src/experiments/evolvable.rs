//! Populations whose competency gene evolves, with or without a cost.

use morphogen_core::stats::{mean, median};
use morphogen_core::{CompetencyMode, EvolutionConfig, RunResult};
use serde::Serialize;

use super::{run_spec, ExperimentId, ExperimentSpec, Variant, VariantRuns};
use crate::error::Result;

/// Competency cost used by the costed experiment.
pub const EXP4_PENALTY_WEIGHT: f64 = 1e-4;

impl ExperimentSpec {
    /// Evolvable competency, init `[1, 15]`, mutation range `[1, 500]`, no cost.
    pub fn exp3(base: EvolutionConfig, repeats: u32, base_seed: u64) -> Self {
        Self::evolvable(ExperimentId::Exp3, base, 0.0, repeats, base_seed)
    }

    /// As [`ExperimentSpec::exp3`] with fitness penalty weight `pw`.
    pub fn exp4(base: EvolutionConfig, pw: f64, repeats: u32, base_seed: u64) -> Self {
        Self::evolvable(ExperimentId::Exp4, base, pw, repeats, base_seed)
    }

    fn evolvable(
        id: ExperimentId,
        base: EvolutionConfig,
        pw: f64,
        repeats: u32,
        base_seed: u64,
    ) -> Self {
        let competency = if base.competency.is_evolvable() {
            base.competency
        } else {
            CompetencyMode::evolvable_default()
        };
        let config = EvolutionConfig {
            competency,
            competent_fraction: None,
            penalty_weight: pw,
            ..base.clone()
        };
        Self {
            id,
            base_config: base,
            repeats,
            base_seed,
            variants: vec![Variant {
                label: if pw > 0.0 {
                    format!("evolvable_pw{pw}")
                } else {
                    "evolvable".into()
                },
                config,
            }],
        }
    }
}

/// Median of the best individual's competency gene over the final 20% of
/// generations.
pub fn stable_competency(run: &RunResult) -> Option<f64> {
    let n = run.records.len();
    let tail = (n / 5).max(1);
    let values: Vec<f64> = run.records[n.saturating_sub(tail)..]
        .iter()
        .filter_map(|g| g.best_competency.map(f64::from))
        .collect();
    median(&values)
}

/// Genotype-phenotype correlation averaged over a run of generations and all
/// repeats. Generations with an undefined correlation are left out and counted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationBin {
    pub start: usize,
    pub end: usize,
    pub mean: Option<f64>,
    pub defined: usize,
    pub undefined: usize,
}

#[derive(Debug, Clone)]
pub struct EvolvableReport {
    pub variants: Vec<VariantRuns>,
    pub bin_width: usize,
    pub correlation_bins: Vec<CorrelationBin>,
    pub stable_values: Vec<Option<f64>>,
}

impl EvolvableReport {
    pub fn runs(&self) -> &[RunResult] {
        &self.variants[0].runs
    }
}

/// Runs an evolvable-competency spec and bins correlations `bin_width`
/// generations wide.
pub fn run_evolvable(
    spec: &ExperimentSpec,
    jobs: usize,
    bin_width: usize,
) -> Result<EvolvableReport> {
    let variants = run_spec(spec, jobs)?;
    let runs = &variants[0].runs;
    let correlation_bins = correlation_bins(runs, bin_width);
    let stable_values = runs.iter().map(stable_competency).collect();
    Ok(EvolvableReport {
        variants,
        bin_width,
        correlation_bins,
        stable_values,
    })
}

pub fn correlation_bins(runs: &[RunResult], width: usize) -> Vec<CorrelationBin> {
    let width = width.max(1);
    let len = runs.iter().map(|r| r.records.len()).max().unwrap_or(0);
    (0..len)
        .step_by(width)
        .map(|start| {
            let end = (start + width).min(len);
            let mut defined = Vec::new();
            let mut undefined = 0;
            for run in runs {
                for g in run.records.iter().skip(start).take(end - start) {
                    match g.corr_geno_pheno {
                        Some(c) => defined.push(c),
                        None => undefined += 1,
                    }
                }
            }
            CorrelationBin {
                start,
                end,
                mean: (!defined.is_empty()).then(|| mean(&defined)),
                defined: defined.len(),
                undefined,
            }
        })
        .collect()
}
