use alloc::format;

use crate::error::{bad_config, Result};
use crate::genome::InitMode;

/// How the competency gene behaves across a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CompetencyMode {
    /// Every embryo is hardwired.
    None,
    /// Competent embryos carry this swap budget for the whole run.
    Fixed(u32),
    /// The competency gene starts in `init_range` and mutates within
    /// `mutate_range` (both inclusive).
    Evolvable {
        init_range: (u32, u32),
        mutate_range: (u32, u32),
    },
}

impl CompetencyMode {
    pub const fn evolvable_default() -> Self {
        CompetencyMode::Evolvable {
            init_range: (1, 15),
            mutate_range: (1, 500),
        }
    }

    pub fn is_evolvable(&self) -> bool {
        matches!(self, CompetencyMode::Evolvable { .. })
    }
}

/// Fitness cost of carrying competency: `pf' = pf - pw * x / x_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PenaltyRule {
    pub weight: f64,
    pub x_max: u32,
}

impl PenaltyRule {
    pub fn apply(&self, phenotypic: f64, competency: Option<u32>) -> f64 {
        match competency {
            Some(x) if self.weight != 0.0 => {
                phenotypic - self.weight * (f64::from(x) / f64::from(self.x_max))
            }
            _ => phenotypic,
        }
    }
}

/// Genetic-algorithm hyperparameters for one run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvolutionConfig {
    pub pop_size: usize,
    pub genome_len: usize,
    pub max_generations: u32,
    /// Probability that an individual receives a structural point mutation
    /// (and, independently, a competency-gene mutation when evolvable).
    pub mutation_prob: f64,
    /// Fraction of the population kept by selection.
    pub selection_frac: f64,
    pub competency: CompetencyMode,
    /// When set, only this fraction of the initial population is competent;
    /// the rest is hardwired.
    pub competent_fraction: Option<f64>,
    pub x_max: u32,
    pub penalty_weight: f64,
    pub init_mode: InitMode,
    pub stop_at_max_fitness: bool,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            pop_size: 100,
            genome_len: 50,
            max_generations: 1000,
            mutation_prob: 0.6,
            selection_frac: 0.1,
            competency: CompetencyMode::None,
            competent_fraction: None,
            x_max: 500,
            penalty_weight: 0.0,
            init_mode: InitMode::UniformWithReplacement,
            stop_at_max_fitness: false,
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn penalty(&self) -> PenaltyRule {
        PenaltyRule {
            weight: self.penalty_weight,
            x_max: self.x_max,
        }
    }

    /// Number of embryos kept by selection each generation.
    pub fn selected_count(&self) -> usize {
        super::operators::selection_size(self.pop_size, self.selection_frac)
    }

    /// Number of competent embryos in the initial population.
    pub fn initial_competent(&self) -> usize {
        match (self.competency, self.competent_fraction) {
            (CompetencyMode::None, _) => 0,
            (_, None) => self.pop_size,
            (_, Some(frac)) => libm::round(frac * self.pop_size as f64) as usize,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(bad_config("pop_size", "must be at least 2"));
        }
        if self.genome_len < 2 {
            return Err(bad_config("genome_len", "must be at least 2"));
        }
        if u32::try_from(self.genome_len).is_err() {
            return Err(bad_config("genome_len", "too large"));
        }
        if self.max_generations == 0 {
            return Err(bad_config("max_generations", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(bad_config(
                "mutation_prob",
                format!("{} is outside [0, 1]", self.mutation_prob),
            ));
        }
        if !(self.selection_frac > 0.0 && self.selection_frac <= 1.0) {
            return Err(bad_config(
                "selection_frac",
                format!("{} is outside (0, 1]", self.selection_frac),
            ));
        }
        if self.x_max == 0 {
            return Err(bad_config("x_max", "must be positive"));
        }
        if !(self.penalty_weight >= 0.0 && self.penalty_weight.is_finite()) {
            return Err(bad_config(
                "penalty_weight",
                "must be a non-negative number",
            ));
        }
        match self.competency {
            CompetencyMode::None => {}
            CompetencyMode::Fixed(x) => {
                if x == 0 || x > self.x_max {
                    return Err(bad_config(
                        "competency",
                        format!("fixed level {x} outside [1, {}]", self.x_max),
                    ));
                }
            }
            CompetencyMode::Evolvable {
                init_range: (lo, hi),
                mutate_range: (mlo, mhi),
            } => {
                if !(1 <= lo
                    && lo <= hi
                    && hi <= mhi
                    && mhi <= self.x_max
                    && 1 <= mlo
                    && mlo <= mhi)
                {
                    return Err(bad_config(
                        "competency",
                        format!(
                            "evolvable ranges [{lo}, {hi}] / [{mlo}, {mhi}] must nest inside [1, {}]",
                            self.x_max
                        ),
                    ));
                }
            }
        }
        if let Some(frac) = self.competent_fraction {
            if !(0.0..=1.0).contains(&frac) {
                return Err(bad_config(
                    "competent_fraction",
                    format!("{frac} is outside [0, 1]"),
                ));
            }
        }
        Ok(())
    }
}
