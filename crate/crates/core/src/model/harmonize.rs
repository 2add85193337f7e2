use super::{Robot, Scenario};
use crate::error::{Error, Result};

/// Largest harmonized period accepted by default.
pub const DEFAULT_PERIOD_CAP: u64 = 100_000;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Merges instances with different periods into one scenario whose period is
/// the least common multiple of theirs.
///
/// A robot with native period `p < T` gets its task sequence repeated `T / p`
/// times and `cycle = p`, which pins replica `c` (1-based) inside slots
/// `(c-1)p + 1 ..= cp`: its first task opens no earlier than the cycle start
/// and its last task keeps the trailing minimum gap before the cycle end.
pub fn harmonize_periods(instances: &[Scenario], cap: u64) -> Result<Scenario> {
    if instances.is_empty() {
        return Err(Error::InvalidScenario("nothing to harmonize".into()));
    }
    let mut lcm = 1u64;
    for s in instances {
        let p = s.period() as u64;
        lcm = lcm / gcd(lcm, p) * p;
        if lcm > cap || lcm > u32::MAX as u64 {
            return Err(Error::Overflow { lcm, cap });
        }
    }
    let period = lcm as u32;
    let mut robots = Vec::new();
    for s in instances {
        let replicas = (period / s.period()) as usize;
        for robot in s.robots() {
            if robot.cycle.is_some() {
                return Err(Error::InvalidScenario(
                    "cannot harmonize a robot that is already cycle-confined".into(),
                ));
            }
            if replicas == 1 {
                robots.push(robot.clone());
            } else {
                let tasks = robot
                    .tasks
                    .iter()
                    .cycle()
                    .take(robot.tasks.len() * replicas)
                    .cloned()
                    .collect();
                robots.push(Robot {
                    tasks,
                    cycle: Some(s.period()),
                });
            }
        }
    }
    Scenario::new(period, robots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Schedule, TaskSpec};

    fn single(period: u32, task: TaskSpec) -> Scenario {
        Scenario::from_tasks(period, vec![vec![task]]).unwrap()
    }

    #[test]
    fn identity_for_one_period() {
        let s = single(15, TaskSpec::new(2.0, 2, 1, Some(3)));
        let h = harmonize_periods(std::slice::from_ref(&s), DEFAULT_PERIOD_CAP).unwrap();
        assert_eq!(h, s);
    }

    #[test]
    fn lcm_and_replica_counts() {
        let a = single(3, TaskSpec::new(1.0, 1, 1, None));
        let b = single(5, TaskSpec::new(1.0, 2, 1, None));
        let h = harmonize_periods(&[a, b], DEFAULT_PERIOD_CAP).unwrap();
        assert_eq!(h.period(), 15);
        assert_eq!(h.robots()[0].tasks.len(), 5);
        assert_eq!(h.robots()[1].tasks.len(), 3);
        assert_eq!(h.robots()[0].cycle, Some(3));
    }

    #[test]
    fn overflow() {
        let a = single(7, TaskSpec::new(1.0, 1, 0, None));
        let b = single(11, TaskSpec::new(1.0, 1, 0, None));
        assert!(matches!(harmonize_periods(&[a, b], 50), Err(Error::Overflow { lcm: 77, cap: 50 })));
    }

    #[test]
    fn replicas_stay_in_their_cycle() {
        let a = single(5, TaskSpec::new(1.0, 2, 1, None));
        let b = single(10, TaskSpec::new(1.0, 1, 0, None));
        let h = harmonize_periods(&[a, b], DEFAULT_PERIOD_CAP).unwrap();
        // enumerate every start pair of the replicated robot over the full period
        let mut feasible = Vec::new();
        for s1 in 1..=10 {
            for s2 in 1..=10 {
                let sched = Schedule::new(vec![vec![s1, s2], vec![1]]);
                if h.is_valid(&sched) {
                    feasible.push((s1, s2));
                }
            }
        }
        let expected: Vec<_> = (1..=3).flat_map(|a| (6..=8).map(move |b| (a, b))).collect();
        assert_eq!(feasible, expected);
    }
}
