//! Bounded worker pool for independent runs.

use rayon::prelude::*;

use crate::error::Result;

/// Evaluates `work(0..count)` on at most `jobs` threads. Output is ordered by
/// index, never by completion.
pub fn run_indexed<T, F>(jobs: usize, count: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()?;
    Ok(pool.install(|| (0..count).into_par_iter().map(&work).collect()))
}

/// Thread count to use when the caller does not say.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
