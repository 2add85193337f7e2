//! Uncoordinated reference schedules.
//!
//! `solve_random` is a single randomized pass and serves as the default
//! percentage-reduction denominator. `solve_asap` starts every task as early
//! as its window allows.

use std::time::Instant;

use crate::error::Result;
use crate::model::Scenario;
use crate::report::{Method, SolveReport};
use crate::rtwpa::{best_of_passes, PassBuffer, RtwpaConfig};

/// One random pass. Identical to pass 0 of an RTWPA run with the same seed.
pub fn solve_random(scenario: &Scenario, seed: u64) -> Result<SolveReport> {
    let t0 = Instant::now();
    let (peak, schedule) = best_of_passes(scenario, RtwpaConfig::new(1, seed))?;
    Ok(SolveReport {
        schedule,
        peak,
        method: Method::Random,
        proved_optimal: false,
        runtime: t0.elapsed(),
        nodes_explored: 0,
        seed: Some(seed),
        iterations: None,
    })
}

pub fn solve_asap(scenario: &Scenario) -> Result<SolveReport> {
    let t0 = Instant::now();
    scenario.ensure_feasible()?;
    let mut buf = PassBuffer::new(scenario);
    let peak = buf.run(|es, _| es)?;
    Ok(SolveReport {
        schedule: buf.schedule(),
        peak,
        method: Method::Asap,
        proved_optimal: false,
        runtime: t0.elapsed(),
        nodes_explored: 0,
        seed: None,
        iterations: None,
    })
}
