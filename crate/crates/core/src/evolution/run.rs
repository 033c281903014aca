use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::config::{CompetencyMode, EvolutionConfig};
use super::operators::{assess, mutate, rank, repopulate, Assessment, ChangeCounters};
use crate::error::Result;
use crate::genome::{Embryo, EmbryoKind};
use crate::rng::{rng_from_seed, SimRng};
use crate::stats::pearson;

/// Telemetry for one generation, taken from the assessed population before
/// selection. "Best" means the top-ranked individual by penalized fitness.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenerationRecord {
    pub generation: u32,
    /// Selection fitness of the best individual (penalized when a cost applies).
    pub best_pheno: f64,
    pub best_pheno_raw: f64,
    pub best_geno: f64,
    pub mean_pheno: f64,
    pub mean_pheno_raw: f64,
    pub mean_geno: f64,
    pub best_competency: Option<u32>,
    pub comp_min: Option<u32>,
    pub comp_max: Option<u32>,
    pub competent_count: u32,
    pub hardwired_count: u32,
    /// Pearson correlation of genotypic and raw phenotypic fitness across the
    /// population; `None` when either has zero variance.
    pub corr_geno_pheno: Option<f64>,
    /// Cumulative changed-gene counts per locus after this generation's
    /// mutation step; the last entry is the competency gene.
    pub locus_changes: Vec<u64>,
}

impl GenerationRecord {
    pub fn population(&self) -> u32 {
        self.competent_count + self.hardwired_count
    }

    pub fn competent_prevalence(&self) -> f64 {
        f64::from(self.competent_count) / f64::from(self.population())
    }

    pub fn hardwired_prevalence(&self) -> f64 {
        f64::from(self.hardwired_count) / f64::from(self.population())
    }

    pub fn competency_changes(&self) -> u64 {
        *self.locus_changes.last().unwrap_or(&0)
    }

    pub fn mean_structural_changes(&self) -> f64 {
        let s = &self.locus_changes[..self.locus_changes.len().saturating_sub(1)];
        if s.is_empty() {
            return 0.0;
        }
        s.iter().sum::<u64>() as f64 / s.len() as f64
    }
}

/// All generation records of one seeded run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunResult {
    pub seed: u64,
    pub records: Vec<GenerationRecord>,
}

impl RunResult {
    pub fn series(&self, f: impl Fn(&GenerationRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }
}

/// A run in progress. Owns its population, counters and random source.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: EvolutionConfig,
    rng: SimRng,
    population: Vec<Embryo>,
    counters: ChangeCounters,
    generation: u32,
}

impl Simulation {
    pub fn new(config: EvolutionConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = rng_from_seed(config.seed);
        let population = initial_population(&config, &mut rng)?;
        Ok(Self {
            counters: ChangeCounters::new(config.genome_len),
            config,
            rng,
            population,
            generation: 0,
        })
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.config
    }

    pub fn population(&self) -> &[Embryo] {
        &self.population
    }

    pub fn generation(&self) -> u32 {
        self.generation
    }

    pub fn counters(&self) -> &ChangeCounters {
        &self.counters
    }

    /// Assesses the current population and records it, then selects,
    /// repopulates and mutates to produce the next one.
    pub fn step(&mut self) -> Result<GenerationRecord> {
        let (assessed, order) = self.assess()?;
        let mut record = summarize(self.generation, &self.population, &assessed, &order);

        let keep = self.config.selected_count();
        let selected: Vec<Embryo> = order[..keep]
            .iter()
            .map(|&i| self.population[i].clone())
            .collect();
        let mut next = repopulate(&selected, self.config.pop_size, &mut self.rng)?;
        mutate(&mut next, &self.config, &mut self.rng, &mut self.counters);
        self.population = next;
        self.generation += 1;

        record.locus_changes = self.counters.as_slice().to_vec();
        Ok(record)
    }

    /// Records the current population without advancing it.
    pub fn observe(&self) -> Result<GenerationRecord> {
        let (assessed, order) = self.assess()?;
        let mut record = summarize(self.generation, &self.population, &assessed, &order);
        record.locus_changes = self.counters.as_slice().to_vec();
        Ok(record)
    }

    fn assess(&self) -> Result<(Vec<Assessment>, Vec<usize>)> {
        let assessed = assess(&self.population, &self.config.penalty())?;
        let order = rank(&assessed);
        Ok((assessed, order))
    }

    /// Runs to the configured horizon, or until the best individual reaches
    /// phenotypic fitness 1 when `stop_at_max_fitness` is set.
    pub fn run(mut self) -> Result<RunResult> {
        let mut records = Vec::with_capacity(self.config.max_generations as usize);
        for _ in 0..self.config.max_generations {
            if self.config.stop_at_max_fitness {
                let record = self.observe()?;
                if record.best_pheno_raw >= 1.0 {
                    records.push(record);
                    break;
                }
            }
            records.push(self.step()?);
        }
        Ok(RunResult {
            seed: self.config.seed,
            records,
        })
    }
}

/// Runs one configuration to completion.
pub fn run_evolution(config: &EvolutionConfig) -> Result<RunResult> {
    Simulation::new(config.clone())?.run()
}

fn initial_population(config: &EvolutionConfig, rng: &mut SimRng) -> Result<Vec<Embryo>> {
    let competent = config.initial_competent();
    let mut population = Vec::with_capacity(config.pop_size);
    for i in 0..config.pop_size {
        let x = if i < competent {
            match config.competency {
                CompetencyMode::None => None,
                CompetencyMode::Fixed(x) => Some(x),
                CompetencyMode::Evolvable {
                    init_range: (lo, hi),
                    ..
                } => Some(rng.gen_range(lo..=hi)),
            }
        } else {
            None
        };
        let kind = if x.is_some() {
            EmbryoKind::Competent
        } else {
            EmbryoKind::Hardwired
        };
        population.push(Embryo::random(
            config.genome_len,
            kind,
            x,
            config.x_max,
            config.init_mode,
            rng,
        )?);
    }
    if competent > 0 && competent < config.pop_size {
        population.shuffle(rng);
    }
    Ok(population)
}

fn summarize(
    generation: u32,
    population: &[Embryo],
    assessed: &[Assessment],
    order: &[usize],
) -> GenerationRecord {
    let best = order[0];
    let n = assessed.len() as f64;
    let mean = |f: fn(&Assessment) -> f64| assessed.iter().map(f).sum::<f64>() / n;

    let competencies = population.iter().filter_map(Embryo::competency);
    let comp_min = competencies.clone().min();
    let comp_max = competencies.max();
    let competent_count = population
        .iter()
        .filter(|e| e.kind() == EmbryoKind::Competent)
        .count() as u32;

    let geno: Vec<f64> = assessed.iter().map(|a| a.genotypic).collect();
    let pheno: Vec<f64> = assessed.iter().map(|a| a.phenotypic).collect();

    GenerationRecord {
        generation,
        best_pheno: assessed[best].penalized,
        best_pheno_raw: assessed[best].phenotypic,
        best_geno: assessed[best].genotypic,
        mean_pheno: mean(|a| a.penalized),
        mean_pheno_raw: mean(|a| a.phenotypic),
        mean_geno: mean(|a| a.genotypic),
        best_competency: population[best].competency(),
        comp_min,
        comp_max,
        competent_count,
        hardwired_count: population.len() as u32 - competent_count,
        corr_geno_pheno: pearson(&geno, &pheno).ok().flatten(),
        locus_changes: Vec::new(),
    }
}
