//! Exhaustive reference minimizer.
//!
//! Walks every start vector reachable through the task windows, depth first,
//! robot-major and slot-ascending, keeping an incremental per-slot profile.
//! Because the walk is lexicographic and only strict improvements replace the
//! incumbent, the returned schedule is the lexicographically smallest optimum.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::{finish_slot, peak_less, Scenario, Schedule, Slot};
use crate::report::{Method, SolveReport};

pub const DEFAULT_ORACLE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_schedule: Option<Schedule>,
    pub best_peak: f64,
    pub schedules_enumerated: u64,
    pub feasible_count: u64,
}

/// Upper bound on the number of leaves: the product of window widths with
/// every predecessor at its earliest start (later predecessors only shrink
/// the period-limited side of each window).
pub fn enumeration_estimate(scenario: &Scenario) -> f64 {
    (0..scenario.num_robots())
        .flat_map(|i| scenario.chain(i).earliest_prefix_windows())
        .map(|(es, ls)| (ls - es + 1).max(0) as f64)
        .product()
}

struct Search<'a> {
    scenario: &'a Scenario,
    /// (robot, task) in visiting order.
    order: Vec<(usize, usize)>,
    profile: Vec<f64>,
    starts: Vec<Vec<Slot>>,
    best: Option<(f64, Schedule)>,
    leaves: u64,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize) {
        if depth == self.order.len() {
            self.leaves += 1;
            let peak = self.profile.iter().copied().fold(0.0, f64::max);
            let better = match &self.best {
                None => true,
                Some((best, _)) => peak_less(peak, *best),
            };
            if better {
                self.best = Some((peak, Schedule::new(self.starts.clone())));
            }
            return;
        }
        let (robot, task) = self.order[depth];
        let chain = self.scenario.chain(robot);
        let finish_prev = (task > 0).then(|| {
            finish_slot(self.starts[robot][task - 1], chain.duration(task - 1))
        });
        let (es, ls) = chain.window(task, finish_prev);
        let duration = chain.duration(task) as usize;
        let rate = self.scenario.task(robot, task).rate;
        for start in es..=ls {
            self.starts[robot][task] = start;
            let lo = (start - 1) as usize;
            for v in &mut self.profile[lo..lo + duration] {
                *v += rate;
            }
            self.descend(depth + 1);
            for v in &mut self.profile[lo..lo + duration] {
                *v -= rate;
            }
        }
    }
}

/// Minimum-peak schedule by exhaustive enumeration.
pub fn brute_force_optimal(scenario: &Scenario, cap: u64) -> Result<OracleResult> {
    let estimate = enumeration_estimate(scenario);
    if estimate > cap as f64 {
        return Err(Error::CapExceeded { estimate, cap });
    }
    let order = scenario
        .robots()
        .iter()
        .enumerate()
        .flat_map(|(i, r)| (0..r.tasks.len()).map(move |j| (i, j)))
        .collect();
    let mut search = Search {
        scenario,
        order,
        profile: vec![0.0; scenario.period() as usize],
        starts: scenario.robots().iter().map(|r| vec![0; r.tasks.len()]).collect(),
        best: None,
        leaves: 0,
    };
    search.descend(0);
    let Some((_, best_schedule)) = search.best else {
        // the walk itself found nothing; the closed form only names the culprit
        return Err(scenario.first_infeasible_robot().unwrap_or(Error::Infeasible {
            robot: 0,
            demand: 0,
            period: scenario.period(),
        }));
    };
    // recompute from scratch so the reported peak carries no accumulated rounding
    let best_peak = scenario.traffic_profile(&best_schedule)?.peak;
    Ok(OracleResult {
        best_schedule: Some(best_schedule),
        best_peak,
        schedules_enumerated: search.leaves,
        feasible_count: search.leaves,
    })
}

/// [`brute_force_optimal`] wrapped as a [`SolveReport`].
pub fn solve_oracle(scenario: &Scenario, cap: u64) -> Result<SolveReport> {
    let t0 = Instant::now();
    let res = brute_force_optimal(scenario, cap)?;
    Ok(SolveReport {
        schedule: res.best_schedule.expect("oracle success carries a schedule"),
        peak: res.best_peak,
        method: Method::Oracle,
        proved_optimal: true,
        runtime: t0.elapsed(),
        nodes_explored: res.schedules_enumerated,
        seed: None,
        iterations: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{scenario_a, three_unit_robots};
    use crate::model::TaskSpec;

    #[test]
    fn scenario_a_optimum() {
        let res = brute_force_optimal(&scenario_a(), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(res.best_peak, 3.0);
        // lexicographically smallest optimum
        assert_eq!(res.best_schedule.unwrap().starts, vec![vec![1], vec![3]]);
        assert_eq!(res.feasible_count, 16);
    }

    #[test]
    fn three_unit_robots_optimum() {
        let res = brute_force_optimal(&three_unit_robots(), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(res.best_peak, 2.0);
        assert_eq!(res.feasible_count, 27);
        let sched = res.best_schedule.unwrap();
        assert_eq!(sched.starts, vec![vec![1], vec![1], vec![3]]);
    }

    #[test]
    fn single_task_peak_is_its_rate() {
        let s = Scenario::from_tasks(9, vec![vec![TaskSpec::new(7.0, 3, 2, None)]]).unwrap();
        assert_eq!(brute_force_optimal(&s, DEFAULT_ORACLE_CAP).unwrap().best_peak, 7.0);
    }

    #[test]
    fn cap_and_infeasible() {
        let s = Scenario::from_tasks(15, vec![vec![TaskSpec::new(1.0, 1, 1, None)]; 8]).unwrap();
        assert!(matches!(brute_force_optimal(&s, 1000), Err(Error::CapExceeded { .. })));
        let bad = Scenario::from_tasks(
            5,
            vec![vec![TaskSpec::new(1.0, 3, 2, None), TaskSpec::new(1.0, 3, 1, None)]],
        )
        .unwrap();
        assert!(matches!(brute_force_optimal(&bad, 1000), Err(Error::Infeasible { .. })));
    }
}
