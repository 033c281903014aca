//! Mixed hardwired / competent populations.

use morphogen_core::{CompetencyMode, EvolutionConfig, RunResult};
use serde::Serialize;

use super::{mean_series, run_spec, ExperimentId, ExperimentSpec, Variant, VariantRuns};
use crate::error::Result;

pub const EXP2_LEVELS: [u32; 5] = [10, 25, 40, 75, 95];
pub const EXP2_FRACTIONS: [f64; 4] = [0.025, 0.10, 0.20, 0.30];

impl ExperimentSpec {
    /// One variant per (competency level, initial competent fraction), levels
    /// outermost.
    pub fn exp2(base: EvolutionConfig, repeats: u32, base_seed: u64) -> Self {
        Self::exp2_grid(base, &EXP2_LEVELS, &EXP2_FRACTIONS, repeats, base_seed)
    }

    pub fn exp2_grid(
        base: EvolutionConfig,
        levels: &[u32],
        fractions: &[f64],
        repeats: u32,
        base_seed: u64,
    ) -> Self {
        let variants = levels
            .iter()
            .flat_map(|&level| {
                let base = base.clone();
                fractions.iter().map(move |&frac| Variant {
                    label: format!("level{level}_{}pct", crate::io::pct(frac)),
                    config: EvolutionConfig {
                        competency: CompetencyMode::Fixed(level),
                        competent_fraction: Some(frac),
                        ..base.clone()
                    },
                })
            })
            .collect();
        Self {
            id: ExperimentId::Exp2,
            base_config: base,
            repeats,
            base_seed,
            variants,
        }
    }
}

/// First generation at which competent prevalence exceeds hardwired
/// prevalence and never drops below it afterwards.
pub fn domination_generation(competent: &[f64], hardwired: &[f64]) -> Option<usize> {
    let len = competent.len().min(hardwired.len());
    let mut candidate = None;
    for g in (0..len).rev() {
        let diff = competent[g] - hardwired[g];
        if diff < 0.0 {
            break;
        }
        if diff > 0.0 {
            candidate = Some(g);
        }
    }
    candidate
}

fn run_domination(run: &RunResult) -> Option<usize> {
    let c = run.series(|g| g.competent_prevalence());
    let h = run.series(|g| g.hardwired_prevalence());
    domination_generation(&c, &h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationCell {
    pub level: u32,
    pub fraction: f64,
    /// Domination generation per repeat.
    pub per_repeat: Vec<Option<usize>>,
    /// Domination generation of the repeat-averaged prevalence curves.
    pub mean_curve: Option<usize>,
}

impl DominationCell {
    /// Share of repeats where competent embryos dominated at all.
    pub fn dominated_share(&self) -> f64 {
        self.per_repeat.iter().filter(|d| d.is_some()).count() as f64 / self.per_repeat.len() as f64
    }

    /// Share of repeats dominated by generation `by` (inclusive).
    pub fn dominated_by(&self, by: usize) -> f64 {
        self.per_repeat
            .iter()
            .filter(|d| matches!(d, Some(g) if *g <= by))
            .count() as f64
            / self.per_repeat.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct Exp2Report {
    pub variants: Vec<VariantRuns>,
    pub cells: Vec<DominationCell>,
}

impl Exp2Report {
    pub fn cell(&self, level: u32, fraction: f64) -> Option<&DominationCell> {
        self.cells
            .iter()
            .find(|c| c.level == level && (c.fraction - fraction).abs() < 1e-12)
    }
}

pub fn run_exp2(spec: &ExperimentSpec, jobs: usize) -> Result<Exp2Report> {
    let variants = run_spec(spec, jobs)?;
    let cells = variants.iter().map(domination_cell).collect();
    Ok(Exp2Report { variants, cells })
}

fn domination_cell(v: &VariantRuns) -> DominationCell {
    let level = match v.config.competency {
        CompetencyMode::Fixed(x) => x,
        _ => 0,
    };
    let per_repeat = v.runs.iter().map(run_domination).collect();
    let comp = mean_series(&super::matrix(&v.runs, |g| g.competent_prevalence()));
    let hard = mean_series(&super::matrix(&v.runs, |g| g.hardwired_prevalence()));
    DominationCell {
        level,
        fraction: v.config.competent_fraction.unwrap_or(1.0),
        per_repeat,
        mean_curve: domination_generation(&comp, &hard),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domination_rule() {
        assert_eq!(
            domination_generation(&[0.3, 0.6, 0.7], &[0.7, 0.4, 0.3]),
            Some(1)
        );
        // crossing that later reverses does not count
        assert_eq!(
            domination_generation(&[0.3, 0.6, 0.4], &[0.7, 0.4, 0.6]),
            None
        );
        // ties after crossing are allowed
        assert_eq!(
            domination_generation(&[0.3, 0.6, 0.5], &[0.7, 0.4, 0.5]),
            Some(1)
        );
        // reaching equality only is not dominance
        assert_eq!(
            domination_generation(&[0.3, 0.5, 0.5], &[0.7, 0.5, 0.5]),
            None
        );
        // a fully competent population dominates from the start
        assert_eq!(domination_generation(&[1.0, 1.0], &[0.0, 0.0]), Some(0));
        assert_eq!(
            domination_generation(&[0.6, 0.4, 0.7], &[0.4, 0.6, 0.3]),
            Some(2)
        );
    }
}
