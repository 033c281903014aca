#![no_std]

//! Simulation core for evolving one-dimensional embryos whose cells can
//! rearrange themselves before selection.
//!
//! An [`Embryo`] carries a fixed-length array of structural genes and, when
//! competent, a competency gene giving the number of adjacent swaps its cells
//! may perform during [`develop`]ment. Fitness measures how close the array is
//! to ascending order. The [`evolution`] module wraps development in a
//! selection / crossover / mutation loop and emits one [`GenerationRecord`] per
//! generation. [`stats`] holds the few statistical routines the experiment
//! analyses need.
//!
//! Everything here is deterministic given a seed and allocation is the only
//! runtime requirement.

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod development;
pub mod error;
pub mod evolution;
pub mod genome;
pub mod rng;
pub mod stats;

pub use crate::development::{develop, DevelopmentOutcome};
pub use crate::error::{Error, Result};
pub use crate::evolution::{
    run_evolution, Assessment, CompetencyMode, EvolutionConfig, GenerationRecord, PenaltyRule,
    RunResult, Simulation,
};
pub use crate::genome::{
    fitness, inversion_count, non_inversion_count, pair_count, Embryo, EmbryoKind, FitnessValue,
    InitMode,
};
pub use crate::rng::{derive_seed, SimRng};
