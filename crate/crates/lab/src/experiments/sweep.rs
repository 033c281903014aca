//! Mutation-probability × selection-stringency scan of the stable
//! competency value.

use morphogen_core::stats::{mean, pearson};
use morphogen_core::{derive_seed, run_evolution, CompetencyMode, EvolutionConfig};
use serde::Serialize;

use super::stable_competency;
use crate::error::{LabError, Result};
use crate::pool::run_indexed;

pub const SWEEP_RANGE: (f64, f64) = (0.2, 0.8);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub mutation_probs: Vec<f64>,
    pub selection_fracs: Vec<f64>,
    pub repeats: u32,
    pub base_seed: u64,
    pub base_config: EvolutionConfig,
}

/// `count` evenly spaced values covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

impl SweepSpec {
    /// `rows` mutation probabilities × `cols` selection stringencies, both
    /// evenly spaced over `[0.2, 0.8]`. The base config's competency is forced
    /// to evolvable.
    pub fn grid(
        base: EvolutionConfig,
        rows: usize,
        cols: usize,
        repeats: u32,
        base_seed: u64,
    ) -> Self {
        let (lo, hi) = SWEEP_RANGE;
        let competency = if base.competency.is_evolvable() {
            base.competency
        } else {
            CompetencyMode::evolvable_default()
        };
        Self {
            mutation_probs: linspace(lo, hi, rows),
            selection_fracs: linspace(lo, hi, cols),
            repeats,
            base_seed,
            base_config: EvolutionConfig {
                competency,
                competent_fraction: None,
                ..base
            },
        }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.mutation_probs
            .iter()
            .flat_map(|&m| self.selection_fracs.iter().map(move |&s| (m, s)))
            .collect()
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..u64::from(self.repeats))
            .map(|r| derive_seed(self.base_seed, r))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub mutation_prob: f64,
    pub selection_frac: f64,
    pub stable_values: Vec<f64>,
}

impl SweepPoint {
    pub fn mean_stable(&self) -> f64 {
        mean(&self.stable_values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub points: Vec<SweepPoint>,
    /// Pearson correlations over grid points of (mutation probability,
    /// selection stringency, mean stable value), as a 3 × 3 matrix.
    pub correlation_matrix: [[Option<f64>; 3]; 3],
}

impl SweepReport {
    pub fn mutation_correlation(&self) -> Option<f64> {
        self.correlation_matrix[0][2]
    }

    pub fn selection_correlation(&self) -> Option<f64> {
        self.correlation_matrix[1][2]
    }
}

pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepReport> {
    if spec.repeats == 0 || spec.mutation_probs.is_empty() || spec.selection_fracs.is_empty() {
        return Err(LabError::Config(
            "sweep grid and repeats must be non-empty".into(),
        ));
    }
    let points = spec.points();
    let seeds = spec.seeds();
    let repeats = spec.repeats as usize;
    for &(m, s) in &points {
        EvolutionConfig {
            mutation_prob: m,
            selection_frac: s,
            ..spec.base_config.clone()
        }
        .validate()?;
    }

    // Runs are reduced to their stable value inside the worker; a full
    // 132-point scan would not fit in memory otherwise.
    let stable = run_indexed(jobs, points.len() * repeats, |i| {
        let (p, r) = (i / repeats, i % repeats);
        let (m, s) = points[p];
        let config = EvolutionConfig {
            mutation_prob: m,
            selection_frac: s,
            seed: seeds[r],
            ..spec.base_config.clone()
        };
        run_evolution(&config).map(|run| stable_competency(&run).unwrap_or(f64::NAN))
    })?
    .into_iter()
    .collect::<std::result::Result<Vec<f64>, _>>()?;

    let points: Vec<SweepPoint> = points
        .iter()
        .zip(stable.chunks(repeats))
        .map(|(&(m, s), values)| SweepPoint {
            mutation_prob: m,
            selection_frac: s,
            stable_values: values.to_vec(),
        })
        .collect();

    let columns = [
        points.iter().map(|p| p.mutation_prob).collect::<Vec<_>>(),
        points.iter().map(|p| p.selection_frac).collect(),
        points.iter().map(SweepPoint::mean_stable).collect(),
    ];
    let mut correlation_matrix = [[None; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            correlation_matrix[i][j] = if columns[i].len() < 2 {
                None
            } else {
                pearson(&columns[i], &columns[j])?
            };
        }
    }

    Ok(SweepReport {
        spec: spec.clone(),
        points,
        correlation_matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_132_points() {
        let spec = SweepSpec::grid(EvolutionConfig::default(), 12, 11, 1, 7);
        assert_eq!(spec.points().len(), 132);
        assert_eq!(spec.mutation_probs.first(), Some(&0.2));
        assert!((spec.mutation_probs.last().unwrap() - 0.8).abs() < 1e-12);
        assert!(spec.base_config.competency.is_evolvable());
    }

    #[test]
    fn linspace_edges() {
        assert_eq!(linspace(0.2, 0.8, 1), vec![0.2]);
        let v = linspace(0.2, 0.8, 4);
        assert_eq!(v.len(), 4);
        assert!((v[1] - 0.4).abs() < 1e-12);
    }
}
