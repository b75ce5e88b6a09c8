//! Running many independent scenarios.
//!
//! With the `parallel` feature (default) [`map`] spreads items over the rayon
//! pool; without it, or through [`map_sequential`], items run in order on the
//! calling thread. Results keep input order either way.

use crate::engine::{simulate, Scenario, SolutionTrace};
use crate::error::Result;

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Parallel when the `parallel` feature is enabled, sequential otherwise.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_parallel(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

pub fn simulate_all(scenarios: &[Scenario]) -> Vec<Result<SolutionTrace>> {
    map(scenarios, simulate)
}

pub fn simulate_all_sequential(scenarios: &[Scenario]) -> Vec<Result<SolutionTrace>> {
    map_sequential(scenarios, simulate)
}

/// One copy of `base` per seed.
pub fn seed_sweep(base: &Scenario, seeds: &[u64]) -> Result<Vec<Scenario>> {
    seeds.iter().map(|&s| base.with_seed(s)).collect()
}

/// One copy of `base` per integration step.
pub fn step_sweep(base: &Scenario, steps: &[f64]) -> Vec<Scenario> {
    steps.iter().map(|&h| base.with_step(h)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_keeps_order() {
        let items: Vec<u64> = (0..100).collect();
        let squares = map(&items, |v| v * v);
        assert_eq!(squares, map_sequential(&items, |v| v * v));
        assert_eq!(squares[7], 49);
    }
}
