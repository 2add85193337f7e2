//! Exact minimization of the peak aggregate rate by branch and bound.
//!
//! Each robot's feasible start vectors are enumerated once through the task
//! windows (the windows are exhaustive, so nothing is lost) and turned into
//! *patterns*: the per-slot rate that robot adds to the link. The search then
//! assigns one pattern per robot, keeping for every unassigned robot the set
//! of patterns that still fit under the incumbent peak:
//!
//! * forward checking: a pattern survives only if `profile + pattern` stays
//!   strictly below the incumbent in every slot;
//! * compulsory parts: the slot-wise minimum over a robot's surviving
//!   patterns is traffic that robot will add whatever it picks; these are
//!   summed into a lower envelope and filtering is repeated to a fixpoint;
//! * identical robots are forced into nondecreasing pattern order.
//!
//! The incumbent starts from a short randomized run and the search stops as
//! soon as it meets the volume bound. When the pattern tables would not fit
//! the memory budget the solver falls back to a plain task-by-task search
//! with partial-peak pruning.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use crate::error::Result;
use crate::model::{finish_slot, peak_tol, Scenario, Schedule, Slot, TaskChain};
use crate::report::{Method, SolveReport};
use crate::rtwpa::{best_of_passes, RtwpaConfig};

const WARM_START_ITERATIONS: u64 = 100;
const WARM_START_SEED: u64 = 0x5eed_0fa1;

/// Max(largest single rate, total volume / period).
pub fn volume_lower_bound(scenario: &Scenario) -> f64 {
    scenario
        .max_rate()
        .max(scenario.total_volume() / scenario.period() as f64)
}

/// Tightest bound the search can use: rounded up when all rates are whole.
fn search_lower_bound(scenario: &Scenario) -> f64 {
    let lb = volume_lower_bound(scenario);
    if scenario.has_integral_rates() {
        (lb - 1e-9).ceil()
    } else {
        lb
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incumbent {
    pub peak: f64,
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct ExactOptions {
    pub time_limit: Option<Duration>,
    /// Upper limit on stored pattern cells (patterns × occupied slots) before
    /// switching to the task-level search.
    pub pattern_budget: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            pattern_budget: 4_000_000,
        }
    }
}

pub fn solve_exact(scenario: &Scenario, time_limit: Option<Duration>) -> Result<SolveReport> {
    let options = ExactOptions {
        time_limit,
        ..ExactOptions::default()
    };
    solve_exact_with(scenario, &options, |_| {})
}

/// Like [`solve_exact`], calling `on_incumbent` on every improvement,
/// starting with the warm-start schedule.
pub fn solve_exact_with<F>(
    scenario: &Scenario,
    options: &ExactOptions,
    mut on_incumbent: F,
) -> Result<SolveReport>
where
    F: FnMut(Incumbent),
{
    let t0 = Instant::now();
    scenario.ensure_feasible()?;
    let (warm_peak, warm_schedule) =
        best_of_passes(scenario, RtwpaConfig::new(WARM_START_ITERATIONS, WARM_START_SEED))?;
    on_incumbent(Incumbent {
        peak: warm_peak,
        nodes: 0,
        elapsed: t0.elapsed(),
    });

    let mut ctl = Control {
        deadline: options.time_limit.map(|d| t0 + d),
        t0,
        nodes: 0,
        timed_out: false,
        lower_bound: search_lower_bound(scenario),
        integral: scenario.has_integral_rates(),
        best_peak: warm_peak,
        best: warm_schedule,
        on_incumbent: &mut on_incumbent,
    };

    if !ctl.at_lower_bound() {
        match PatternTable::build(scenario, options.pattern_budget) {
            Some(table) => PatternSearch::new(scenario, &table).run(&mut ctl),
            None => TaskSearch::new(scenario).run(&mut ctl),
        }
    }

    let profile = scenario.traffic_profile(&ctl.best)?;
    Ok(SolveReport {
        schedule: ctl.best,
        peak: profile.peak,
        method: Method::Exact,
        proved_optimal: !ctl.timed_out,
        runtime: t0.elapsed(),
        nodes_explored: ctl.nodes,
        seed: None,
        iterations: None,
    })
}

struct Control<'f> {
    deadline: Option<Instant>,
    t0: Instant,
    nodes: u64,
    timed_out: bool,
    lower_bound: f64,
    integral: bool,
    best_peak: f64,
    best: Schedule,
    on_incumbent: &'f mut dyn FnMut(Incumbent),
}

impl Control<'_> {
    /// Largest slot load an improving schedule may have.
    fn limit(&self) -> f64 {
        if self.integral {
            self.best_peak - 0.5
        } else {
            self.best_peak - peak_tol(self.best_peak, self.best_peak)
        }
    }

    /// Per-slot capacity for volume arguments; whole rates fill whole units.
    fn cap(&self) -> f64 {
        if self.integral {
            self.limit().floor()
        } else {
            self.limit()
        }
    }

    fn at_lower_bound(&self) -> bool {
        self.best_peak <= self.lower_bound + peak_tol(self.best_peak, self.lower_bound)
    }

    /// Counts a node; false once the search must stop.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                self.timed_out = true;
            }
        }
        !self.timed_out
    }

    /// Records an improving schedule; true when it proves optimality.
    fn improve(&mut self, peak: f64, schedule: Schedule) -> bool {
        self.best_peak = peak;
        self.best = schedule;
        (self.on_incumbent)(Incumbent {
            peak,
            nodes: self.nodes,
            elapsed: self.t0.elapsed(),
        });
        self.at_lower_bound()
    }
}

/// All distinct traffic patterns of every robot.
struct PatternTable {
    period: usize,
    robots: Vec<RobotPatterns>,
}

#[derive(Clone)]
struct RobotPatterns {
    /// starts[p * tasks .. (p + 1) * tasks]
    starts: Vec<Slot>,
    tasks: usize,
    /// dense[p * period + t]
    dense: Vec<f64>,
    /// (slot index, rate) of every busy slot, cells[offsets[p]..offsets[p + 1]]
    cells: Vec<(u32, f64)>,
    offsets: Vec<usize>,
    volume: f64,
    /// Index of the first robot with the same task list.
    group: usize,
}

impl RobotPatterns {
    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    fn cells(&self, p: u32) -> &[(u32, f64)] {
        let p = p as usize;
        &self.cells[self.offsets[p]..self.offsets[p + 1]]
    }

    fn dense(&self, p: u32, period: usize) -> &[f64] {
        let p = p as usize;
        &self.dense[p * period..(p + 1) * period]
    }

    fn starts(&self, p: u32) -> &[Slot] {
        let p = p as usize;
        &self.starts[p * self.tasks..(p + 1) * self.tasks]
    }
}

impl PatternTable {
    fn build(scenario: &Scenario, budget: usize) -> Option<Self> {
        let period = scenario.period() as usize;
        let mut used = 0usize;
        let mut robots: Vec<RobotPatterns> = Vec::with_capacity(scenario.num_robots());
        for (i, robot) in scenario.robots().iter().enumerate() {
            let twin = (0..i).find(|&g| scenario.robots()[g] == *robot);
            let mut rp = match twin {
                Some(g) => RobotPatterns {
                    group: g,
                    ..robots[g].clone()
                },
                None => {
                    let mut walk = Enumerator {
                        chain: scenario.chain(i),
                        rates: robot.tasks.iter().map(|t| t.rate).collect(),
                        starts: vec![0; robot.tasks.len()],
                        dense: vec![0.0; period],
                        seen: HashSet::new(),
                        out: RobotPatterns {
                            starts: Vec::new(),
                            tasks: robot.tasks.len(),
                            dense: Vec::new(),
                            cells: Vec::new(),
                            offsets: vec![0],
                            volume: robot.volume(),
                            group: i,
                        },
                        used: 0,
                        budget: budget.saturating_sub(used),
                    };
                    if !walk.walk(0) {
                        return None;
                    }
                    walk.out
                }
            };
            used += rp.cells.len() + rp.dense.len();
            if used > budget {
                return None;
            }
            rp.group = twin.unwrap_or(i);
            robots.push(rp);
        }
        Some(Self { period, robots })
    }
}

/// Depth-first walk over one robot's windows, slot-ascending, keeping the
/// first start vector of every distinct pattern.
struct Enumerator<'a> {
    chain: &'a TaskChain,
    rates: Vec<f64>,
    starts: Vec<Slot>,
    dense: Vec<f64>,
    seen: HashSet<Vec<u64>>,
    out: RobotPatterns,
    used: usize,
    budget: usize,
}

impl Enumerator<'_> {
    /// False when the budget runs out.
    fn walk(&mut self, task: usize) -> bool {
        if task == self.starts.len() {
            let key: Vec<u64> = self.dense.iter().map(|v| v.to_bits()).collect();
            if !self.seen.insert(key) {
                return true;
            }
            let out = &mut self.out;
            out.starts.extend_from_slice(&self.starts);
            out.dense.extend_from_slice(&self.dense);
            let before = out.cells.len();
            out.cells.extend(
                self.dense
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v > 0.0)
                    .map(|(t, &v)| (t as u32, v)),
            );
            out.offsets.push(out.cells.len());
            self.used += self.dense.len() + out.cells.len() - before;
            return self.used <= self.budget;
        }
        let finish_prev =
            (task > 0).then(|| finish_slot(self.starts[task - 1], self.chain.duration(task - 1)));
        let (es, ls) = self.chain.window(task, finish_prev);
        let d = self.chain.duration(task) as usize;
        for start in es..=ls {
            self.starts[task] = start;
            let lo = (start - 1) as usize;
            self.dense[lo..lo + d].fill(self.rates[task]);
            let ok = self.walk(task + 1);
            self.dense[lo..lo + d].fill(0.0);
            if !ok {
                return false;
            }
        }
        true
    }
}

struct PatternSearch<'a> {
    scenario: &'a Scenario,
    table: &'a PatternTable,
    assigned: Vec<Option<u32>>,
}

impl<'a> PatternSearch<'a> {
    fn new(scenario: &'a Scenario, table: &'a PatternTable) -> Self {
        Self {
            scenario,
            table,
            assigned: vec![None; scenario.num_robots()],
        }
    }

    fn run(&mut self, ctl: &mut Control) {
        let domains: Vec<Vec<u32>> = self
            .table
            .robots
            .iter()
            .map(|r| (0..r.len() as u32).collect())
            .collect();
        let profile = vec![0.0; self.table.period];
        self.node(ctl, profile, domains);
    }

    fn schedule(&self) -> Schedule {
        Schedule::new(
            self.assigned
                .iter()
                .zip(&self.table.robots)
                .map(|(p, rp)| rp.starts(p.expect("complete assignment")).to_vec())
                .collect(),
        )
    }

    /// Filters the domains of unassigned robots against `profile` and the
    /// compulsory parts of the others, then checks that the traffic not yet
    /// pinned to a slot still fits under `cap`. False when the node is dead.
    fn propagate(&self, limit: f64, cap: f64, profile: &[f64], domains: &mut [Vec<u32>]) -> bool {
        let period = self.table.period;
        let open: Vec<usize> = (0..domains.len()).filter(|&r| self.assigned[r].is_none()).collect();
        let mut mand = vec![vec![0.0; period]; domains.len()];
        let mut upper = vec![vec![0.0; period]; domains.len()];
        let mut envelope = profile.to_vec();
        let mut first = true;
        loop {
            let mut changed = false;
            for &r in &open {
                let rp = &self.table.robots[r];
                let own = &mand[r];
                let before = domains[r].len();
                domains[r].retain(|&p| {
                    rp.cells(p)
                        .iter()
                        .all(|&(t, v)| envelope[t as usize] - own[t as usize] + v <= limit)
                });
                if domains[r].is_empty() {
                    return false;
                }
                if !first && domains[r].len() == before {
                    continue;
                }
                // slot-wise minimum and maximum over the surviving patterns
                let mut lo = rp.dense(domains[r][0], period).to_vec();
                let mut hi = lo.clone();
                for &p in &domains[r][1..] {
                    for ((l, h), &v) in lo.iter_mut().zip(hi.iter_mut()).zip(rp.dense(p, period)) {
                        *l = l.min(v);
                        *h = h.max(v);
                    }
                }
                for t in 0..period {
                    let delta = lo[t] - mand[r][t];
                    if delta != 0.0 {
                        envelope[t] += delta;
                        if envelope[t] > limit {
                            return false;
                        }
                        changed = true;
                    }
                }
                mand[r] = lo;
                upper[r] = hi;
            }
            first = false;
            if !changed {
                break;
            }
        }
        let free: f64 = open
            .iter()
            .map(|&r| self.table.robots[r].volume - mand[r].iter().sum::<f64>())
            .sum();
        let room: f64 = (0..period)
            .map(|t| {
                let reachable: f64 = open.iter().map(|&r| upper[r][t] - mand[r][t]).sum();
                reachable.min(cap - envelope[t]).max(0.0)
            })
            .sum();
        free <= room + peak_tol(free, room)
    }

    fn node(&mut self, ctl: &mut Control, profile: Vec<f64>, mut domains: Vec<Vec<u32>>) -> bool {
        if !ctl.tick() {
            return true;
        }
        let limit = ctl.limit();
        if limit < ctl.lower_bound - peak_tol(limit, ctl.lower_bound) {
            return false;
        }
        if !self.propagate(limit, ctl.cap(), &profile, &mut domains) {
            return false;
        }
        // smallest domain first, heavier robot on ties
        let next = (0..domains.len())
            .filter(|&r| self.assigned[r].is_none())
            .min_by(|&a, &b| {
                domains[a]
                    .len()
                    .cmp(&domains[b].len())
                    .then(
                        self.table.robots[b]
                            .volume
                            .total_cmp(&self.table.robots[a].volume),
                    )
                    .then(a.cmp(&b))
            });
        let Some(r) = next else {
            let peak = profile.iter().copied().fold(0.0, f64::max);
            return ctl.improve(peak, self.schedule());
        };
        let rp = &self.table.robots[r];
        let current = profile.iter().copied().fold(0.0, f64::max);
        let mut candidates: Vec<(f64, u32)> = domains[r]
            .iter()
            .map(|&p| {
                let peak = rp
                    .cells(p)
                    .iter()
                    .map(|&(t, v)| profile[t as usize] + v)
                    .fold(current, f64::max);
                (peak, p)
            })
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let group = rp.group;
        for (resulting, p) in candidates {
            if resulting > ctl.limit() {
                // sorted ascending, and the limit only shrinks
                break;
            }
            let mut child_profile = profile.clone();
            for &(t, v) in rp.cells(p) {
                child_profile[t as usize] += v;
            }
            let mut child = domains.clone();
            child[r] = vec![p];
            for (q, dom) in child.iter_mut().enumerate() {
                if q == r || self.assigned[q].is_some() || self.table.robots[q].group != group {
                    continue;
                }
                if q > r {
                    dom.retain(|&x| x >= p);
                } else {
                    dom.retain(|&x| x <= p);
                }
            }
            self.assigned[r] = Some(p);
            let stop = self.node(ctl, child_profile, child);
            self.assigned[r] = None;
            if stop {
                return true;
            }
        }
        let _ = self.scenario;
        false
    }
}

/// Task-by-task search used when the pattern tables are too large.
struct TaskSearch<'a> {
    scenario: &'a Scenario,
    order: Vec<(usize, usize)>,
    starts: Vec<Vec<Slot>>,
    profile: Vec<f64>,
}

impl<'a> TaskSearch<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        let mut robots: Vec<usize> = (0..scenario.num_robots()).collect();
        robots.sort_by(|&a, &b| {
            scenario.robots()[b]
                .volume()
                .total_cmp(&scenario.robots()[a].volume())
                .then(a.cmp(&b))
        });
        let order = robots
            .into_iter()
            .flat_map(|i| (0..scenario.robots()[i].tasks.len()).map(move |j| (i, j)))
            .collect();
        Self {
            scenario,
            order,
            starts: scenario.robots().iter().map(|r| vec![0; r.tasks.len()]).collect(),
            profile: vec![0.0; scenario.period() as usize],
        }
    }

    fn run(&mut self, ctl: &mut Control) {
        self.descend(ctl, 0);
    }

    fn descend(&mut self, ctl: &mut Control, depth: usize) -> bool {
        if !ctl.tick() {
            return true;
        }
        if depth == self.order.len() {
            let peak = self.profile.iter().copied().fold(0.0, f64::max);
            return ctl.improve(peak, Schedule::new(self.starts.clone()));
        }
        let (robot, task) = self.order[depth];
        let chain = self.scenario.chain(robot);
        let finish_prev =
            (task > 0).then(|| finish_slot(self.starts[robot][task - 1], chain.duration(task - 1)));
        let (es, ls) = chain.window(task, finish_prev);
        let d = chain.duration(task) as usize;
        let rate = self.scenario.task(robot, task).rate;
        let mut candidates: Vec<(f64, Slot)> = (es..=ls)
            .map(|s| {
                let lo = (s - 1) as usize;
                let peak = self.profile[lo..lo + d].iter().fold(0.0f64, |m, &v| m.max(v + rate));
                (peak, s)
            })
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (peak, start) in candidates {
            if peak > ctl.limit() {
                break;
            }
            let lo = (start - 1) as usize;
            let saved: Vec<f64> = self.profile[lo..lo + d].to_vec();
            for v in &mut self.profile[lo..lo + d] {
                *v += rate;
            }
            self.starts[robot][task] = start;
            let stop = self.descend(ctl, depth + 1);
            self.profile[lo..lo + d].copy_from_slice(&saved);
            if stop {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::fixtures::{scenario_a, three_unit_robots};
    use crate::model::TaskSpec;

    #[test]
    fn volume_bounds() {
        assert_eq!(volume_lower_bound(&scenario_a()), 3.0);
        assert!((volume_lower_bound(&three_unit_robots()) - 1.2).abs() < 1e-12);
        let zero = Scenario::from_tasks(4, vec![vec![TaskSpec::new(0.0, 2, 0, None)]; 2]).unwrap();
        assert_eq!(volume_lower_bound(&zero), 0.0);
        assert_eq!(search_lower_bound(&three_unit_robots()), 2.0);
    }

    #[test]
    fn small_optima() {
        let r = solve_exact(&scenario_a(), None).unwrap();
        assert_eq!(r.peak, 3.0);
        assert!(r.proved_optimal);
        assert!(scenario_a().is_valid(&r.schedule));
        let r = solve_exact(&three_unit_robots(), None).unwrap();
        assert_eq!(r.peak, 2.0);
    }

    #[test]
    fn infeasible_is_rejected() {
        let s = Scenario::from_tasks(
            5,
            vec![vec![TaskSpec::new(1.0, 3, 2, None), TaskSpec::new(1.0, 3, 1, None)]],
        )
        .unwrap();
        assert!(matches!(solve_exact(&s, None), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn task_search_fallback_agrees() {
        let s = Scenario::from_tasks(
            9,
            vec![
                vec![TaskSpec::new(3.0, 2, 1, Some(3)), TaskSpec::new(1.0, 1, 1, None)],
                vec![TaskSpec::new(2.0, 3, 1, None)],
                vec![TaskSpec::new(2.0, 1, 1, Some(2)), TaskSpec::new(4.0, 2, 1, None)],
            ],
        )
        .unwrap();
        let full = solve_exact(&s, None).unwrap();
        let options = ExactOptions {
            time_limit: None,
            pattern_budget: 0,
        };
        let fallback = solve_exact_with(&s, &options, |_| {}).unwrap();
        assert_eq!(full.peak, fallback.peak);
        assert!(fallback.proved_optimal);
        let oracle = crate::oracle::brute_force_optimal(&s, 1_000_000).unwrap();
        assert_eq!(full.peak, oracle.best_peak);
    }

    #[test]
    fn real_rates() {
        let s = Scenario::from_tasks(
            8,
            vec![
                vec![TaskSpec::new(0.65, 3, 0, Some(2)), TaskSpec::new(1.3, 2, 1, None)],
                vec![TaskSpec::new(0.1, 2, 1, None)],
                vec![TaskSpec::new(1.2, 4, 1, None)],
            ],
        )
        .unwrap();
        let exact = solve_exact(&s, None).unwrap();
        let oracle = crate::oracle::brute_force_optimal(&s, 1_000_000).unwrap();
        assert!((exact.peak - oracle.best_peak).abs() < 1e-9);
    }

    #[test]
    fn incumbents_are_nonincreasing() {
        let s = crate::generate::generate(&crate::generate::GenParams::table_one(8, 2, 11)).unwrap();
        let mut seen = Vec::new();
        let r = solve_exact_with(&s, &ExactOptions::default(), |inc| seen.push(inc.peak)).unwrap();
        assert!(!seen.is_empty());
        assert!(seen.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(*seen.last().unwrap(), r.peak);
    }

    #[test]
    fn zero_time_limit_returns_incumbent() {
        let s = crate::generate::generate(&crate::generate::GenParams::table_one(10, 2, 3)).unwrap();
        let r = solve_exact(&s, Some(Duration::ZERO)).unwrap();
        assert!(s.is_valid(&r.schedule));
        // warm start may already meet the lower bound
        if !r.proved_optimal {
            assert!(r.nodes_explored <= 1);
        }
    }
}
