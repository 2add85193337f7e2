//! Randomized time-window preservation: best of `N` independent random
//! passes, each placing every task uniformly inside its window.
//!
//! Pass `p` draws from `ChaCha8Rng::seed_from_u64(derive_seed(&[seed, p]))`,
//! so the first `N` passes of a longer run are the same passes, and the
//! best-of-`N` peak can only fall as `N` grows.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::{finish_slot, peak_less, Scenario, Schedule, Slot};
use crate::report::{Method, SolveReport};
use crate::seeding::{derive_seed, rng_from_seed, uniform_inclusive};

pub const DEFAULT_ITERATIONS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RtwpaConfig {
    pub iterations: u64,
    pub seed: u64,
}

impl Default for RtwpaConfig {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
        }
    }
}

impl RtwpaConfig {
    pub fn new(iterations: u64, seed: u64) -> Self {
        Self { iterations, seed }
    }
}

/// Seed of pass `pass` under master seed `seed`.
pub fn pass_seed(seed: u64, pass: u64) -> u64 {
    derive_seed(&[seed, pass])
}

/// Reusable buffers for single passes over a scenario.
pub(crate) struct PassBuffer<'a> {
    scenario: &'a Scenario,
    profile: Vec<f64>,
    pub(crate) starts: Vec<Vec<Slot>>,
}

impl<'a> PassBuffer<'a> {
    pub(crate) fn new(scenario: &'a Scenario) -> Self {
        Self {
            scenario,
            profile: vec![0.0; scenario.period() as usize],
            starts: scenario.robots().iter().map(|r| vec![0; r.tasks.len()]).collect(),
        }
    }

    /// Walks robots and tasks in order, starting each task at
    /// `pick(es, ls)`, and returns the peak. Fails on the first empty window.
    pub(crate) fn run<F>(&mut self, mut pick: F) -> Result<f64>
    where
        F: FnMut(Slot, Slot) -> Slot,
    {
        let scenario = self.scenario;
        for (i, robot) in scenario.robots().iter().enumerate() {
            let chain = scenario.chain(i);
            let mut finish = None;
            for (j, task) in robot.tasks.iter().enumerate() {
                let (es, ls) = chain.window(j, finish);
                if es > ls {
                    self.clear(i, j);
                    return Err(scenario.infeasible_error(i));
                }
                let start = pick(es, ls);
                self.starts[i][j] = start;
                let lo = (start - 1) as usize;
                for v in &mut self.profile[lo..lo + task.duration as usize] {
                    *v += task.rate;
                }
                finish = Some(finish_slot(start, task.duration));
            }
        }
        let mut peak = 0.0f64;
        for (robot, starts) in scenario.robots().iter().zip(&self.starts) {
            for (task, &start) in robot.tasks.iter().zip(starts) {
                let lo = (start - 1) as usize;
                for v in &self.profile[lo..lo + task.duration as usize] {
                    peak = peak.max(*v);
                }
            }
        }
        self.clear(scenario.num_robots(), 0);
        Ok(peak)
    }

    /// Zeroes the slots touched by every task placed before (robot, task).
    fn clear(&mut self, robot: usize, task: usize) {
        let scenario = self.scenario;
        for (i, (r, starts)) in scenario.robots().iter().zip(&self.starts).enumerate() {
            if i > robot {
                break;
            }
            let upto = if i == robot { task } else { r.tasks.len() };
            for (t, &start) in r.tasks.iter().zip(starts).take(upto) {
                let lo = (start - 1) as usize;
                self.profile[lo..lo + t.duration as usize].fill(0.0);
            }
        }
    }

    pub(crate) fn schedule(&self) -> Schedule {
        Schedule::new(self.starts.clone())
    }
}

/// Best of `iterations` passes; ties go to the lowest pass index.
pub(crate) fn best_of_passes(scenario: &Scenario, config: RtwpaConfig) -> Result<(f64, Schedule)> {
    if config.iterations == 0 {
        return Err(Error::InvalidParams("iterations must be at least 1".into()));
    }
    let mut buf = PassBuffer::new(scenario);
    let mut best: Option<(f64, Schedule)> = None;
    for pass in 0..config.iterations {
        let mut rng = rng_from_seed(pass_seed(config.seed, pass));
        let peak = buf.run(|es, ls| uniform_inclusive(&mut rng, es, ls))?;
        if best.as_ref().is_none_or(|(b, _)| peak_less(peak, *b)) {
            best = Some((peak, buf.schedule()));
        }
    }
    Ok(best.expect("at least one pass ran"))
}

pub fn solve_rtwpa(scenario: &Scenario, config: RtwpaConfig) -> Result<SolveReport> {
    let t0 = Instant::now();
    let (peak, schedule) = best_of_passes(scenario, config)?;
    Ok(SolveReport {
        schedule,
        peak,
        method: Method::Rtwpa,
        proved_optimal: false,
        runtime: t0.elapsed(),
        nodes_explored: 0,
        seed: Some(config.seed),
        iterations: Some(config.iterations),
    })
}
