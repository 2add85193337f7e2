use std::fmt;

use serde::Serialize;

use super::{finish_slot, Scenario, Schedule, Slot};
use crate::error::Result;

/// The constraint a task breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// Start before slot 1 (or before its cycle's first slot).
    StartTooEarly { start: Slot, earliest: Slot },
    /// Occupancy runs past the period (or its cycle).
    FinishAfterPeriod { finish: Slot, limit: Slot },
    GapBelowMin { gap: Slot, min: u32 },
    GapAboveMax { gap: Slot, max: u32 },
    /// Last task of a period does not leave its minimum trailing gap.
    EndOfPeriod { finish: Slot, gap_min: u32, limit: Slot },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub robot: usize,
    pub task: usize,
    #[serde(flatten)]
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "robot {} task {}: ", self.robot + 1, self.task + 1)?;
        match &self.rule {
            Rule::StartTooEarly { start, earliest } => {
                write!(f, "start {start} is before slot {earliest}")
            }
            Rule::FinishAfterPeriod { finish, limit } => {
                write!(f, "finish {finish} is after slot {limit}")
            }
            Rule::GapBelowMin { gap, min } => write!(f, "gap {gap} to successor is below minimum {min}"),
            Rule::GapAboveMax { gap, max } => write!(f, "gap {gap} to successor exceeds maximum {max}"),
            Rule::EndOfPeriod {
                finish,
                gap_min,
                limit,
            } => write!(
                f,
                "finish {finish} + trailing gap {gap_min} = {} exceeds slot {limit}",
                finish + *gap_min as Slot
            ),
        }
    }
}

impl Scenario {
    /// Every constraint breach of `schedule`; empty means the schedule is valid.
    pub fn validate_schedule(&self, schedule: &Schedule) -> Result<Vec<Violation>> {
        self.check_shape(schedule)?;
        let mut out = Vec::new();
        for (i, (robot, starts)) in self.robots.iter().zip(&schedule.starts).enumerate() {
            let chain = self.chain(i);
            for (j, (task, &start)) in robot.tasks.iter().zip(starts).enumerate() {
                let mut push = |rule| out.push(Violation { robot: i, task: j, rule });
                let earliest = chain.cycle_start(j).unwrap_or(1);
                if start < earliest {
                    push(Rule::StartTooEarly { start, earliest });
                }
                let finish = finish_slot(start, task.duration);
                let limit = chain.cycle_end(j);
                if finish > limit {
                    push(Rule::FinishAfterPeriod { finish, limit });
                }
                if chain.last_in_cycle(j) {
                    if finish + task.gap_min as Slot > limit {
                        push(Rule::EndOfPeriod {
                            finish,
                            gap_min: task.gap_min,
                            limit,
                        });
                    }
                } else {
                    let gap = starts[j + 1] - finish - 1;
                    if gap < task.gap_min as Slot {
                        push(Rule::GapBelowMin {
                            gap,
                            min: task.gap_min,
                        });
                    }
                    if let Some(max) = task.gap_max {
                        if gap > max as Slot {
                            push(Rule::GapAboveMax { gap, max });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_valid(&self, schedule: &Schedule) -> bool {
        matches!(self.validate_schedule(schedule), Ok(v) if v.is_empty())
    }
}
