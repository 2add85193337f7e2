#![allow(dead_code)]

use peakslot::model::{Scenario, TaskSpec};
use proptest::prelude::*;

/// Integer-rate task with optional maximum gap.
pub fn task(max_duration: u32) -> impl Strategy<Value = TaskSpec> {
    (1u32..=4, 1..=max_duration, 0u32..=2, proptest::option::of(0u32..=3)).prop_map(
        |(rate, duration, gap_min, extra)| {
            TaskSpec::new(rate as f64, duration, gap_min, extra.map(|e| gap_min + e))
        },
    )
}

/// Scenarios with the given robot and task counts; may be infeasible.
pub fn scenario(
    robots: std::ops::RangeInclusive<usize>,
    tasks: std::ops::RangeInclusive<usize>,
    period: std::ops::RangeInclusive<u32>,
) -> impl Strategy<Value = Scenario> {
    (period, robots).prop_flat_map(move |(t, i)| {
        proptest::collection::vec(proptest::collection::vec(task(3), tasks.clone()), i)
            .prop_map(move |robots| Scenario::from_tasks(t, robots).unwrap())
    })
}

/// Small enough for the brute-force oracle.
pub fn small_scenario() -> impl Strategy<Value = Scenario> {
    scenario(1..=3, 1..=2, 4..=9)
}

pub fn feasible_small_scenario() -> impl Strategy<Value = Scenario> {
    small_scenario().prop_filter("infeasible", Scenario::is_feasible)
}

pub fn with_rates(s: &Scenario, f: impl Fn(f64) -> f64) -> Scenario {
    let robots = s
        .robots()
        .iter()
        .map(|r| {
            r.tasks
                .iter()
                .map(|t| TaskSpec { rate: f(t.rate), ..t.clone() })
                .collect()
        })
        .collect();
    Scenario::from_tasks(s.period(), robots).unwrap()
}
