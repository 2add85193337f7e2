use serde::{Deserialize, Serialize};

use super::{Robot, Slot};

/// Inclusive range of admissible start slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub es: Slot,
    pub ls: Slot,
}

impl TimeWindow {
    pub fn width(&self) -> u64 {
        (self.ls - self.es + 1).max(0) as u64
    }

    pub fn contains(&self, slot: Slot) -> bool {
        (self.es..=self.ls).contains(&slot)
    }
}

/// Last slot occupied by a task starting at `start`.
#[inline]
pub fn finish_slot(start: Slot, duration: u32) -> Slot {
    start + duration as Slot - 1
}

/// Earliest start of a successor whose predecessor finishes at `finish_prev`.
#[inline]
pub fn earliest_start_next(finish_prev: Slot, gap_min: u32) -> Slot {
    finish_prev + gap_min as Slot + 1
}

/// Latest start of a successor allowed by the predecessor's maximum gap.
#[inline]
pub fn latest_start_by_gap(finish_prev: Slot, gap_max: u32) -> Slot {
    finish_prev + gap_max as Slot + 1
}

#[derive(Debug, Clone)]
struct Step {
    duration: u32,
    /// Gap bounds inherited from the predecessor within the same cycle.
    pred_gap_min: u32,
    pred_gap_max: Option<u32>,
    /// Set on the first task of every cycle; holds the cycle's first slot.
    cycle_start: Option<Slot>,
    cycle_end: Slot,
    last_in_cycle: bool,
    latest_by_period: Slot,
}

/// Per-robot window data, precomputed once per scenario.
#[derive(Debug, Clone)]
pub(crate) struct TaskChain {
    steps: Vec<Step>,
    /// (demand Σ(d + g_min), cycle length) of one replica.
    replica_demand: (u64, u32),
}

impl TaskChain {
    pub(crate) fn new(robot: &Robot, period: u32) -> Self {
        let cycle = robot.cycle.unwrap_or(period);
        let replicas = (period / cycle).max(1) as usize;
        let per_replica = robot.tasks.len() / replicas;
        let mut steps = Vec::with_capacity(robot.tasks.len());
        let mut demand = 0u64;
        for (c, replica) in robot.tasks.chunks(per_replica).enumerate() {
            let cycle_end = (c as Slot + 1) * cycle as Slot;
            // suffix[k] = Σ_{m ≥ k} (g_min + d) within this replica
            let mut suffix = vec![0 as Slot; replica.len() + 1];
            for k in (0..replica.len()).rev() {
                suffix[k] = suffix[k + 1] + (replica[k].gap_min + replica[k].duration) as Slot;
            }
            if c == 0 {
                demand = suffix[0] as u64;
            }
            for (k, task) in replica.iter().enumerate() {
                let (pred_gap_min, pred_gap_max, cycle_start) = if k == 0 {
                    (0, None, Some(c as Slot * cycle as Slot + 1))
                } else {
                    (replica[k - 1].gap_min, replica[k - 1].gap_max, None)
                };
                steps.push(Step {
                    duration: task.duration,
                    pred_gap_min,
                    pred_gap_max,
                    cycle_start,
                    cycle_end,
                    last_in_cycle: k + 1 == replica.len(),
                    latest_by_period: cycle_end - suffix[k] + 1,
                });
            }
        }
        Self {
            steps,
            replica_demand: (demand, cycle),
        }
    }

    pub(crate) fn duration(&self, task: usize) -> u32 {
        self.steps[task].duration
    }

    /// First slot of the cycle `task` belongs to, if it opens that cycle.
    pub(crate) fn cycle_start(&self, task: usize) -> Option<Slot> {
        self.steps[task].cycle_start
    }

    pub(crate) fn cycle_end(&self, task: usize) -> Slot {
        self.steps[task].cycle_end
    }

    pub(crate) fn last_in_cycle(&self, task: usize) -> bool {
        self.steps[task].last_in_cycle
    }

    pub(crate) fn latest_by_period(&self, task: usize) -> Slot {
        self.steps[task].latest_by_period
    }

    pub(crate) fn replica_demand(&self) -> (u64, u32) {
        self.replica_demand
    }

    pub(crate) fn overloaded_replica(&self) -> Option<(u64, u32)> {
        let (demand, cycle) = self.replica_demand;
        (demand > cycle as u64).then_some((demand, cycle))
    }

    /// `(es, ls)` for `task`; may be empty (`es > ls`).
    #[inline]
    pub(crate) fn window(&self, task: usize, finish_prev: Option<Slot>) -> (Slot, Slot) {
        let step = &self.steps[task];
        if let Some(start) = step.cycle_start {
            // first task of a cycle: Algorithm-1 style job-1 window
            let es = match finish_prev {
                Some(f) if task > 0 => start.max(earliest_start_next(f, step.pred_gap_min)),
                _ => start,
            };
            return (es, step.latest_by_period);
        }
        let f = finish_prev.expect("a non-initial task needs its predecessor's finish");
        let es = earliest_start_next(f, step.pred_gap_min);
        let ls = match step.pred_gap_max {
            Some(max) => latest_start_by_gap(f, max).min(step.latest_by_period),
            None => step.latest_by_period,
        };
        (es, ls)
    }

    /// Window of every task when each predecessor starts as early as possible.
    pub(crate) fn earliest_prefix_windows(&self) -> Vec<(Slot, Slot)> {
        let mut out = Vec::with_capacity(self.steps.len());
        let mut finish = None;
        for task in 0..self.steps.len() {
            let (es, ls) = self.window(task, finish);
            out.push((es, ls));
            finish = Some(finish_slot(es, self.steps[task].duration));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::{fixtures, Scenario, TaskSpec};

    #[test]
    fn slot_arithmetic() {
        assert_eq!(finish_slot(1, 3), 3);
        assert_eq!(finish_slot(5, 1), 5);
        assert_eq!(finish_slot(4, 2), 5);
        assert_eq!(earliest_start_next(5, 1), 7);
        assert_eq!(earliest_start_next(3, 0), 4);
        assert_eq!(earliest_start_next(10, 4), 15);
        assert_eq!(latest_start_by_gap(5, 3), 9);
        assert_eq!(latest_start_by_gap(5, 1), 7);
        assert_eq!(latest_start_by_gap(2, 5), 8);
    }

    #[test]
    fn latest_by_period() {
        let single = Scenario::from_tasks(15, vec![vec![TaskSpec::new(1.0, 2, 1, None)]]).unwrap();
        assert_eq!(single.latest_start_by_period(0, 0), 13);
        assert_eq!(fixtures::tight_robot().latest_start_by_period(0, 0), 4);
        let two = Scenario::from_tasks(6, vec![vec![TaskSpec::new(1.0, 2, 1, None); 2]]).unwrap();
        assert_eq!(two.latest_start_by_period(0, 1), 4);
    }

    #[test]
    fn windows() {
        let s = fixtures::tight_robot();
        assert_eq!(s.compute_window(0, 0, None).unwrap(), TimeWindow { es: 1, ls: 4 });

        let s = Scenario::from_tasks(6, vec![vec![TaskSpec::new(1.0, 2, 1, Some(3)); 2]]).unwrap();
        assert_eq!(s.compute_window(0, 1, Some(2)).unwrap(), TimeWindow { es: 4, ls: 4 });

        let s = Scenario::from_tasks(
            5,
            vec![vec![TaskSpec::new(1.0, 3, 2, None), TaskSpec::new(1.0, 3, 1, None)]],
        )
        .unwrap();
        match s.compute_window(0, 0, None) {
            Err(Error::WindowEmpty { es: 1, ls: -3, .. }) => {}
            other => panic!("expected empty window, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_gap_uses_period_bound_only() {
        let s = Scenario::from_tasks(
            20,
            vec![vec![TaskSpec::new(1.0, 2, 1, None), TaskSpec::new(1.0, 2, 1, None)]],
        )
        .unwrap();
        assert_eq!(s.compute_window(0, 1, Some(2)).unwrap(), TimeWindow { es: 4, ls: 18 });
    }
}
