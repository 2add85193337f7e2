//! Problem instances, schedules and the time-window algebra shared by every
//! solver.
//!
//! Slots are 1-based (`1..=period`) everywhere a slot crosses the public API.
//! Robot and task indices are plain 0-based vector indices.

mod harmonize;
mod profile;
mod validate;
mod window;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use harmonize::{harmonize_periods, DEFAULT_PERIOD_CAP};
pub use profile::{popr, TrafficProfile};
pub use validate::{Rule, Violation};
pub use window::{earliest_start_next, finish_slot, latest_start_by_gap, TimeWindow};

pub(crate) use window::TaskChain;

/// A slot index. Signed so that out-of-range starts and the period-chain
/// bound (which may drop below 1) stay representable.
pub type Slot = i64;

/// One communication burst of a robot and its gap bounds to the successor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub rate: f64,
    pub duration: u32,
    pub gap_min: u32,
    /// `None` means unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_max: Option<u32>,
}

impl TaskSpec {
    pub fn new(rate: f64, duration: u32, gap_min: u32, gap_max: Option<u32>) -> Self {
        Self {
            rate,
            duration,
            gap_min,
            gap_max,
        }
    }

    /// Rate times duration.
    pub fn volume(&self) -> f64 {
        self.rate * self.duration as f64
    }

    fn check(&self) -> std::result::Result<(), String> {
        if !self.rate.is_finite() || self.rate < 0.0 {
            return Err(format!("rate must be finite and nonnegative, got {}", self.rate));
        }
        if self.duration == 0 {
            return Err("duration must be at least 1".into());
        }
        if let Some(max) = self.gap_max {
            if max < self.gap_min {
                return Err(format!("gap_max {max} is below gap_min {}", self.gap_min));
            }
        }
        Ok(())
    }
}

/// The ordered task sequence of one robot.
///
/// `cycle` is only set on robots produced by [`harmonize_periods`]: the task
/// list then holds `period / cycle` back-to-back replicas of the native
/// sequence and each replica is confined to its own cycle of `cycle` slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Robot {
    pub tasks: Vec<TaskSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<u32>,
}

impl Robot {
    pub fn new(tasks: Vec<TaskSpec>) -> Self {
        Self { tasks, cycle: None }
    }

    pub fn volume(&self) -> f64 {
        self.tasks.iter().map(TaskSpec::volume).sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawScenario {
    period: u32,
    robots: Vec<Robot>,
}

/// A complete problem instance: the period and every robot's task chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawScenario", into = "RawScenario")]
pub struct Scenario {
    period: u32,
    robots: Vec<Robot>,
    chains: Vec<TaskChain>,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.period == other.period && self.robots == other.robots
    }
}

impl TryFrom<RawScenario> for Scenario {
    type Error = Error;

    fn try_from(raw: RawScenario) -> Result<Self> {
        Scenario::new(raw.period, raw.robots)
    }
}

impl From<Scenario> for RawScenario {
    fn from(s: Scenario) -> Self {
        RawScenario {
            period: s.period,
            robots: s.robots,
        }
    }
}

impl Scenario {
    pub fn new(period: u32, robots: Vec<Robot>) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidScenario("period must be at least 1".into()));
        }
        if robots.is_empty() {
            return Err(Error::InvalidScenario("scenario has no robots".into()));
        }
        for (i, robot) in robots.iter().enumerate() {
            if robot.tasks.is_empty() {
                return Err(Error::InvalidScenario(format!("robot {} has no tasks", i + 1)));
            }
            for (j, task) in robot.tasks.iter().enumerate() {
                task.check().map_err(|msg| {
                    Error::InvalidScenario(format!("robot {} task {}: {msg}", i + 1, j + 1))
                })?;
            }
            if let Some(cycle) = robot.cycle {
                if cycle == 0 || !period.is_multiple_of(cycle) {
                    return Err(Error::InvalidScenario(format!(
                        "robot {}: cycle {cycle} does not divide period {period}",
                        i + 1
                    )));
                }
                let replicas = (period / cycle) as usize;
                if robot.tasks.len() % replicas != 0 {
                    return Err(Error::InvalidScenario(format!(
                        "robot {}: {} tasks cannot form {replicas} equal replicas",
                        i + 1,
                        robot.tasks.len()
                    )));
                }
            }
        }
        let chains = robots.iter().map(|r| TaskChain::new(r, period)).collect();
        Ok(Self {
            period,
            robots,
            chains,
        })
    }

    /// Convenience constructor for the common case of plain task lists.
    pub fn from_tasks(period: u32, robots: Vec<Vec<TaskSpec>>) -> Result<Self> {
        Self::new(period, robots.into_iter().map(Robot::new).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization is infallible")
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn robots(&self) -> &[Robot] {
        &self.robots
    }

    pub fn num_robots(&self) -> usize {
        self.robots.len()
    }

    pub fn num_tasks(&self) -> usize {
        self.robots.iter().map(|r| r.tasks.len()).sum()
    }

    pub fn task(&self, robot: usize, task: usize) -> &TaskSpec {
        &self.robots[robot].tasks[task]
    }

    pub(crate) fn chain(&self, robot: usize) -> &TaskChain {
        &self.chains[robot]
    }

    /// Σ r·d over every task.
    pub fn total_volume(&self) -> f64 {
        self.robots.iter().map(Robot::volume).sum()
    }

    pub fn max_rate(&self) -> f64 {
        self.robots
            .iter()
            .flat_map(|r| r.tasks.iter().map(|t| t.rate))
            .fold(0.0, f64::max)
    }

    /// True when every rate is a whole number, so every peak is integral.
    pub fn has_integral_rates(&self) -> bool {
        self.robots
            .iter()
            .flat_map(|r| r.tasks.iter())
            .all(|t| t.rate.fract() == 0.0 && t.rate < 2f64.powi(52))
    }

    /// Closed-form feasibility: every robot's chain of durations plus
    /// minimum gaps fits inside its period (or each of its cycles).
    pub fn is_feasible(&self) -> bool {
        self.first_infeasible_robot().is_none()
    }

    pub(crate) fn first_infeasible_robot(&self) -> Option<Error> {
        self.chains.iter().enumerate().find_map(|(i, chain)| {
            chain.overloaded_replica().map(|(demand, period)| Error::Infeasible {
                robot: i,
                demand,
                period,
            })
        })
    }

    pub(crate) fn infeasible_error(&self, robot: usize) -> Error {
        let (demand, period) = self.chains[robot].replica_demand();
        Error::Infeasible {
            robot,
            demand,
            period,
        }
    }

    pub(crate) fn ensure_feasible(&self) -> Result<()> {
        match self.first_infeasible_robot() {
            Some(err) => Err(err),
            None => Ok(()),
        }
    }

    /// Latest start of `task` that still leaves room for the rest of the
    /// robot's chain before the period (or cycle) ends. May be below 1.
    pub fn latest_start_by_period(&self, robot: usize, task: usize) -> Slot {
        self.chains[robot].latest_by_period(task)
    }

    /// Admissible start slots of `task` given the finish of its predecessor.
    /// `finish_prev` is ignored for the first task of a robot.
    pub fn compute_window(
        &self,
        robot: usize,
        task: usize,
        finish_prev: Option<Slot>,
    ) -> Result<TimeWindow> {
        let (es, ls) = self.chains[robot].window(task, finish_prev);
        if es > ls {
            return Err(Error::WindowEmpty { robot, task, es, ls });
        }
        Ok(TimeWindow { es, ls })
    }

    pub(crate) fn check_shape(&self, schedule: &Schedule) -> Result<()> {
        if schedule.starts.len() != self.robots.len() {
            return Err(Error::ShapeMismatch(format!(
                "schedule has {} robots, scenario has {}",
                schedule.starts.len(),
                self.robots.len()
            )));
        }
        for (i, (starts, robot)) in schedule.starts.iter().zip(&self.robots).enumerate() {
            if starts.len() != robot.tasks.len() {
                return Err(Error::ShapeMismatch(format!(
                    "robot {} has {} starts for {} tasks",
                    i + 1,
                    starts.len(),
                    robot.tasks.len()
                )));
            }
        }
        Ok(())
    }
}

/// Start slot of every task, `starts[robot][task]`, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub starts: Vec<Vec<Slot>>,
}

impl Schedule {
    pub fn new(starts: Vec<Vec<Slot>>) -> Self {
        Self { starts }
    }

    /// Robot-major, then task.
    pub fn flatten(&self) -> Vec<Slot> {
        self.starts.iter().flatten().copied().collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedule serialization is infallible")
    }
}

/// Relative tolerance used whenever two peaks are compared.
pub const PEAK_RTOL: f64 = 1e-9;

pub(crate) fn peak_tol(a: f64, b: f64) -> f64 {
    PEAK_RTOL * a.abs().max(b.abs()).max(1.0)
}

/// `a < b` by more than the peak tolerance.
pub fn peak_less(a: f64, b: f64) -> bool {
    a < b - peak_tol(a, b)
}

pub fn peak_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= peak_tol(a, b)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_scenarios() {
        assert!(Scenario::from_tasks(0, vec![vec![TaskSpec::new(1.0, 1, 0, None)]]).is_err());
        assert!(Scenario::from_tasks(5, vec![vec![]]).is_err());
        assert!(Scenario::from_tasks(5, vec![vec![TaskSpec::new(1.0, 0, 0, None)]]).is_err());
        assert!(Scenario::from_tasks(5, vec![vec![TaskSpec::new(-1.0, 1, 0, None)]]).is_err());
        assert!(Scenario::from_tasks(5, vec![vec![TaskSpec::new(1.0, 1, 3, Some(2))]]).is_err());
        let bad_cycle = Robot {
            tasks: vec![TaskSpec::new(1.0, 1, 0, None)],
            cycle: Some(4),
        };
        assert!(Scenario::new(10, vec![bad_cycle]).is_err());
    }

    #[test]
    fn json_format() {
        let text = r#"{ "period": 15, "robots": [ { "tasks": [
            { "rate": 3.0, "duration": 2, "gap_min": 1, "gap_max": 4 },
            { "rate": 1.5, "duration": 1, "gap_min": 1 } ] } ] }"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.period(), 15);
        assert_eq!(s.task(0, 0).gap_max, Some(4));
        assert_eq!(s.task(0, 1).gap_max, None);
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(!s.to_json().contains("cycle"));

        let invalid = r#"{ "period": 0, "robots": [] }"#;
        assert!(matches!(Scenario::from_json(invalid), Err(Error::Json(_))));

        let sched = Schedule::from_json(r#"{ "starts": [[1,6,11],[2,7,12]] }"#).unwrap();
        assert_eq!(sched.starts[1][2], 12);
        assert_eq!(sched.flatten(), vec![1, 6, 11, 2, 7, 12]);
    }

    #[test]
    fn feasibility_closed_form() {
        assert!(fixtures::tight_robot().is_feasible());
        assert!(fixtures::scenario_a().is_feasible());
        let s = Scenario::from_tasks(
            5,
            vec![vec![TaskSpec::new(1.0, 3, 2, None), TaskSpec::new(1.0, 3, 1, None)]],
        )
        .unwrap();
        assert!(!s.is_feasible());
    }

    #[test]
    fn peak_comparisons() {
        assert!(peak_less(2.0, 3.0));
        assert!(!peak_less(3.0, 3.0));
        assert!(peak_eq(0.1 + 0.2, 0.3));
        assert!(!peak_less(0.3, 0.1 + 0.2));
    }
}
