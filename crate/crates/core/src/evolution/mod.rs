//! The genetic algorithm: develop, select, cross over, mutate.
//!
//! Each generation the whole population is developed from its genes and
//! assessed. The top fraction by (penalized) phenotypic fitness survives
//! unchanged into the next population, which is then filled with crossover
//! offspring of the survivors and point-mutated as a whole. Hardwired and
//! competent embryos never interbreed.

mod config;
mod operators;
mod run;

pub use config::{CompetencyMode, EvolutionConfig, PenaltyRule};
pub use operators::{
    allocate_slots, assess, assess_one, crossover_at, crossover_pair, mutate, rank, repopulate,
    select, selection_size, Assessment, ChangeCounters,
};
pub use run::{run_evolution, GenerationRecord, RunResult, Simulation};
