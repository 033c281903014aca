//! Hardwired versus fixed-competency populations.

use morphogen_core::stats::{ci95, median, t_test, threshold_crossings, Band, TTestReport};
use morphogen_core::{CompetencyMode, EvolutionConfig};
use serde::Serialize;

use super::{matrix, run_spec, ExperimentId, ExperimentSpec, Variant, VariantRuns};
use crate::error::{LabError, Result};

pub const EXP1_THRESHOLDS: [f64; 6] = [0.65, 0.75, 0.8, 0.9, 0.97, 1.0];
pub const EXP1_LEVELS: [u32; 3] = [20, 100, 400];
pub const TTEST_GENERATIONS: [usize; 3] = [2, 10, 20];

impl ExperimentSpec {
    /// Hardwired plus fixed competency 20 / 100 / 400.
    pub fn exp1(base: EvolutionConfig, repeats: u32, base_seed: u64) -> Self {
        Self::exp1_with_levels(base, &EXP1_LEVELS, repeats, base_seed)
    }

    pub fn exp1_with_levels(
        base: EvolutionConfig,
        levels: &[u32],
        repeats: u32,
        base_seed: u64,
    ) -> Self {
        let mut variants = vec![Variant {
            label: "hardwired".into(),
            config: EvolutionConfig {
                competency: CompetencyMode::None,
                competent_fraction: None,
                ..base.clone()
            },
        }];
        variants.extend(levels.iter().map(|&x| Variant {
            label: format!("level{x}"),
            config: EvolutionConfig {
                competency: CompetencyMode::Fixed(x),
                competent_fraction: None,
                ..base.clone()
            },
        }));
        Self {
            id: ExperimentId::Exp1,
            base_config: base,
            repeats,
            base_seed,
            variants,
        }
    }
}

/// Median first-crossing generation of the best phenotypic fitness per
/// threshold. `None` when the median repeat never crosses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub label: String,
    pub medians: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TTestRow {
    pub comparison: String,
    pub generation: usize,
    pub report: TTestReport,
}

#[derive(Debug, Clone)]
pub struct Exp1Report {
    pub variants: Vec<VariantRuns>,
    pub thresholds: Vec<f64>,
    pub threshold_table: Vec<ThresholdRow>,
    pub ttests: Vec<TTestRow>,
    pub pheno_bands: Vec<Vec<Band>>,
    pub geno_bands: Vec<Vec<Band>>,
}

pub fn run_exp1(spec: &ExperimentSpec, jobs: usize) -> Result<Exp1Report> {
    let variants = run_spec(spec, jobs)?;
    analyze_exp1(variants)
}

pub(crate) fn analyze_exp1(variants: Vec<VariantRuns>) -> Result<Exp1Report> {
    let thresholds = EXP1_THRESHOLDS.to_vec();
    let threshold_table = variants
        .iter()
        .map(|v| ThresholdRow {
            label: v.label.clone(),
            medians: median_crossings(v, &thresholds),
        })
        .collect();

    let mut ttests = Vec::new();
    if let Some((reference, rest)) = variants.split_first() {
        if reference.runs.len() >= 2 {
            for other in rest {
                for &g in &TTEST_GENERATIONS {
                    let a = best_at(reference, g);
                    let b = best_at(other, g);
                    if let (Some(a), Some(b)) = (a, b) {
                        ttests.push(TTestRow {
                            comparison: format!("{} vs {}", reference.label, other.label),
                            generation: g,
                            report: t_test(&a, &b)?,
                        });
                    }
                }
            }
        }
    }

    let bands = |f: fn(&morphogen_core::GenerationRecord) -> f64| -> Result<Vec<Vec<Band>>> {
        variants
            .iter()
            .map(|v| {
                if v.runs.len() < 2 {
                    return Ok(Vec::new());
                }
                ci95(&matrix(&v.runs, f)).map_err(LabError::from)
            })
            .collect()
    };
    let pheno_bands = bands(|g| g.best_pheno)?;
    let geno_bands = bands(|g| g.best_geno)?;

    Ok(Exp1Report {
        variants,
        thresholds,
        threshold_table,
        ttests,
        pheno_bands,
        geno_bands,
    })
}

fn best_at(v: &VariantRuns, generation: usize) -> Option<Vec<f64>> {
    v.runs
        .iter()
        .map(|r| r.records.get(generation).map(|g| g.best_pheno))
        .collect()
}

/// Median over repeats of the first generation each threshold is reached;
/// repeats that never reach it count as later than any that do.
pub fn median_crossings(v: &VariantRuns, thresholds: &[f64]) -> Vec<Option<f64>> {
    let per_repeat: Vec<Vec<Option<usize>>> = v
        .runs
        .iter()
        .map(|r| threshold_crossings(&r.series(|g| g.best_pheno), thresholds))
        .collect();
    (0..thresholds.len())
        .map(|t| {
            let xs: Vec<f64> = per_repeat
                .iter()
                .map(|c| c[t].map_or(f64::INFINITY, |g| g as f64))
                .collect();
            median(&xs).filter(|m| m.is_finite())
        })
        .collect()
}
