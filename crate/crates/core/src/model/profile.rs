use serde::Serialize;

use super::{finish_slot, Scenario, Schedule};
use crate::error::{Error, Result};

/// Aggregate rate per slot (`per_slot[t - 1]` is slot `t`) and its maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrafficProfile {
    pub per_slot: Vec<f64>,
    pub peak: f64,
}

impl TrafficProfile {
    pub fn from_slots(per_slot: Vec<f64>) -> Self {
        let peak = per_slot.iter().copied().fold(0.0, f64::max);
        Self { per_slot, peak }
    }

    pub fn total(&self) -> f64 {
        self.per_slot.iter().sum()
    }

    /// Max minus min over the slots that carry traffic; 0 for an idle profile.
    pub fn spread(&self) -> f64 {
        let busy = self.per_slot.iter().copied().filter(|&v| v > 0.0);
        let (lo, hi) = busy.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if lo.is_finite() {
            hi - lo
        } else {
            0.0
        }
    }

    /// `slot,aggregate_rate` CSV, one row per slot.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("slot,aggregate_rate\n");
        for (t, v) in self.per_slot.iter().enumerate() {
            out.push_str(&format!("{},{}\n", t + 1, v));
        }
        out
    }
}

impl Scenario {
    /// Per-slot aggregate rate of `schedule`. Occupancy outside `1..=period`
    /// is dropped, so invalid schedules still produce a diagnostic profile.
    pub fn traffic_profile(&self, schedule: &Schedule) -> Result<TrafficProfile> {
        self.check_shape(schedule)?;
        let period = self.period as i64;
        let mut per_slot = vec![0.0; self.period as usize];
        for (robot, starts) in self.robots.iter().zip(&schedule.starts) {
            for (task, &start) in robot.tasks.iter().zip(starts) {
                let lo = start.max(1);
                let hi = finish_slot(start, task.duration).min(period);
                for t in lo..=hi {
                    per_slot[(t - 1) as usize] += task.rate;
                }
            }
        }
        Ok(TrafficProfile::from_slots(per_slot))
    }
}

/// Percent reduction of `method_peak` relative to `baseline_peak`.
pub fn popr(baseline_peak: f64, method_peak: f64) -> Result<f64> {
    if baseline_peak == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    Ok(100.0 * (baseline_peak - method_peak) / baseline_peak)
}
