//! Experiment harness for `morphogen-core`.
//!
//! Runs the four competency experiments and the mutation/selection sweep on a
//! bounded worker pool, summarizes them, and writes deterministic CSV, NDJSON
//! and JSON outputs.

pub mod commands;
pub mod error;
pub mod experiments;
pub mod io;
pub mod pool;
pub mod selftest;
pub mod settings;

pub use error::{LabError, Result};
