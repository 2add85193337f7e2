//! Experiment sweeps over generated scenarios.
//!
//! Scenario `s` of cell `(I, J)` is generated with seed
//! `derive_seed(&[master_seed, I, J, s])`; the RTWPA and random baselines on
//! that scenario use `derive_seed(&[scenario_seed, 1])` and
//! `derive_seed(&[scenario_seed, 2])`. Units of work run on a rayon pool and
//! are reassembled in `(I, J, s, method)` order, so the rows do not depend on
//! the number of workers.

use std::collections::{BTreeMap, HashMap};
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{solve_asap, solve_random};
use crate::error::{Error, Result};
use crate::exact::solve_exact;
use crate::generate::{generate, GenParams};
use crate::model::{popr, Scenario};
use crate::oracle::{solve_oracle, DEFAULT_ORACLE_CAP};
use crate::report::{Method, SolveReport};
use crate::rtwpa::{solve_rtwpa, RtwpaConfig, DEFAULT_ITERATIONS};
use crate::seeding::derive_seed;

pub const DEFAULT_EXACT_TIME_LIMIT: Duration = Duration::from_secs(120);

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// (robots, tasks per robot) cells, swept in this order.
    pub cells: Vec<(usize, usize)>,
    pub scenarios_per_cell: usize,
    pub methods: Vec<Method>,
    pub master_seed: u64,
    pub exact_time_limit: Option<Duration>,
    pub baseline_method: Method,
    pub rtwpa_iterations: u64,
    /// Template for everything except robots, tasks and seed.
    pub gen: GenParams,
    /// Worker threads; `None` uses rayon's default.
    pub workers: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            cells: Self::grid(&[2, 4, 6, 8, 10], &[1, 2, 3]),
            scenarios_per_cell: 100,
            methods: vec![Method::Exact, Method::Rtwpa, Method::Random],
            master_seed: 0,
            exact_time_limit: Some(DEFAULT_EXACT_TIME_LIMIT),
            baseline_method: Method::Random,
            rtwpa_iterations: DEFAULT_ITERATIONS,
            gen: GenParams::default(),
            workers: None,
        }
    }
}

impl BenchConfig {
    /// Every (robots, tasks) pair, robots-major.
    pub fn grid(robot_counts: &[usize], task_counts: &[usize]) -> Vec<(usize, usize)> {
        robot_counts
            .iter()
            .flat_map(|&i| task_counts.iter().map(move |&j| (i, j)))
            .collect()
    }

    pub fn scenario_seed(&self, robots: usize, tasks: usize, scenario_id: usize) -> u64 {
        derive_seed(&[self.master_seed, robots as u64, tasks as u64, scenario_id as u64])
    }

    pub fn scenario(&self, robots: usize, tasks: usize, scenario_id: usize) -> Result<Scenario> {
        generate(&GenParams {
            robots,
            tasks_per_robot: tasks,
            seed: self.scenario_seed(robots, tasks, scenario_id),
            ..self.gen.clone()
        })
    }

    fn check(&self) -> Result<()> {
        if self.scenarios_per_cell == 0 {
            return Err(Error::InvalidParams("scenarios_per_cell must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParams("no methods requested".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub robots: usize,
    pub tasks: usize,
    pub scenario_id: usize,
    pub method: Method,
    pub peak: f64,
    pub runtime_ms: f64,
    pub proved_optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub robots: usize,
    pub tasks: usize,
    pub method: Method,
    pub mean_peak: f64,
    pub mean_popr: f64,
    pub mean_runtime_ms: f64,
}

/// Runs one method on one scenario.
pub fn run_method(
    scenario: &Scenario,
    method: Method,
    scenario_seed: u64,
    config: &BenchConfig,
) -> Result<SolveReport> {
    match method {
        Method::Exact => solve_exact(scenario, config.exact_time_limit),
        Method::Rtwpa => solve_rtwpa(
            scenario,
            RtwpaConfig::new(config.rtwpa_iterations, derive_seed(&[scenario_seed, 1])),
        ),
        Method::Random => solve_random(scenario, derive_seed(&[scenario_seed, 2])),
        Method::Asap => solve_asap(scenario),
        Method::Oracle => solve_oracle(scenario, DEFAULT_ORACLE_CAP),
    }
}

/// ((robots, tasks, scenario_id), scenario, reports in method order)
pub type KeptInstance = ((usize, usize, usize), Scenario, Vec<SolveReport>);

/// Rows plus full reports for the instances listed in `keep`.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub rows: Vec<BenchRow>,
    pub kept: Vec<KeptInstance>,
}

pub fn run_experiment(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    Ok(run_experiment_keeping(config, &[])?.rows)
}

pub fn run_experiment_keeping(config: &BenchConfig, keep: &[(usize, usize, usize)]) -> Result<Experiment> {
    config.check()?;
    let units: Vec<(usize, usize, usize)> = config
        .cells
        .iter()
        .flat_map(|&(i, j)| (1..=config.scenarios_per_cell).map(move |s| (i, j, s)))
        .collect();
    let work = |&(i, j, s): &(usize, usize, usize)| -> Result<(Vec<BenchRow>, Option<_>)> {
        let annotate = |e: Error| Error::Experiment {
            robots: i,
            tasks: j,
            scenario: s,
            source: Box::new(e),
        };
        let scenario = config.scenario(i, j, s).map_err(annotate)?;
        let seed = config.scenario_seed(i, j, s);
        let mut rows = Vec::with_capacity(config.methods.len());
        let mut reports = Vec::new();
        for &method in &config.methods {
            let report = run_method(&scenario, method, seed, config).map_err(annotate)?;
            rows.push(BenchRow {
                robots: i,
                tasks: j,
                scenario_id: s,
                method,
                peak: report.peak,
                runtime_ms: report.runtime.as_secs_f64() * 1e3,
                proved_optimal: report.proved_optimal,
            });
            reports.push(report);
        }
        let kept = keep.contains(&(i, j, s)).then_some(((i, j, s), scenario, reports));
        Ok((rows, kept))
    };
    let results: Vec<Result<_>> = match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParams(e.to_string()))?
            .install(|| units.par_iter().map(work).collect()),
        None => units.par_iter().map(work).collect(),
    };
    let mut rows = Vec::with_capacity(units.len() * config.methods.len());
    let mut kept = Vec::new();
    for r in results {
        let (mut unit_rows, unit_kept) = r?;
        unit_rows.sort_by_key(|row| row.method);
        rows.extend(unit_rows);
        kept.extend(unit_kept);
    }
    Ok(Experiment { rows, kept })
}

/// Drops every scenario whose exact row did not prove optimality. Returns
/// the remaining rows and the number of scenarios dropped.
pub fn exclude_unproven(rows: &[BenchRow]) -> (Vec<BenchRow>, usize) {
    let unproven: Vec<(usize, usize, usize)> = rows
        .iter()
        .filter(|r| r.method == Method::Exact && !r.proved_optimal)
        .map(|r| (r.robots, r.tasks, r.scenario_id))
        .collect();
    let kept = rows
        .iter()
        .filter(|r| !unproven.contains(&(r.robots, r.tasks, r.scenario_id)))
        .cloned()
        .collect();
    (kept, unproven.len())
}

/// Per (robots, tasks, method): mean peak, mean per-scenario percentage
/// reduction against `baseline`, and mean runtime.
pub fn summarize(rows: &[BenchRow], baseline: Method) -> Result<Vec<SummaryRow>> {
    let base: HashMap<(usize, usize, usize), f64> = rows
        .iter()
        .filter(|r| r.method == baseline)
        .map(|r| ((r.robots, r.tasks, r.scenario_id), r.peak))
        .collect();
    // (peak sum, popr sum, runtime sum, count)
    type Sums = (f64, f64, f64, usize);
    let mut acc: BTreeMap<(usize, usize, Method), Sums> = BTreeMap::new();
    for r in rows {
        let key = (r.robots, r.tasks, r.scenario_id);
        let Some(&b) = base.get(&key) else {
            return Err(Error::MissingBaseline {
                method: baseline.to_string(),
                robots: r.robots,
                tasks: r.tasks,
                scenario: r.scenario_id,
            });
        };
        let reduction = if r.method == baseline { 0.0 } else { popr(b, r.peak)? };
        let e = acc.entry((r.robots, r.tasks, r.method)).or_default();
        e.0 += r.peak;
        e.1 += reduction;
        e.2 += r.runtime_ms;
        e.3 += 1;
    }
    Ok(acc
        .into_iter()
        .map(|((robots, tasks, method), (peak, red, rt, n))| {
            let n = n as f64;
            SummaryRow {
                robots,
                tasks,
                method,
                mean_peak: peak / n,
                mean_popr: red / n,
                mean_runtime_ms: rt / n,
            }
        })
        .collect())
}

fn to_csv<T: Serialize>(items: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for item in items {
        w.serialize(item)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn rows_to_csv(rows: &[BenchRow]) -> Result<String> {
    if rows.is_empty() {
        return Ok("robots,tasks,scenario_id,method,peak,runtime_ms,proved_optimal\n".into());
    }
    to_csv(rows)
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> Result<String> {
    if rows.is_empty() {
        return Ok("robots,tasks,method,mean_peak,mean_popr,mean_runtime_ms\n".into());
    }
    to_csv(rows)
}

/// Per-slot aggregate rate of every report, one column per method.
pub fn dump_profiles(scenario: &Scenario, reports: &[SolveReport]) -> Result<String> {
    let profiles = reports
        .iter()
        .map(|r| scenario.traffic_profile(&r.schedule))
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["slot".to_string()];
    header.extend(reports.iter().map(|r| r.method.to_string()));
    w.write_record(&header)?;
    for t in 0..scenario.period() as usize {
        let mut record = vec![(t + 1).to_string()];
        record.extend(profiles.iter().map(|p| p.per_slot[t].to_string()));
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::scenario_a;

    fn small(methods: Vec<Method>) -> BenchConfig {
        BenchConfig {
            cells: vec![(2, 1)],
            scenarios_per_cell: 3,
            methods,
            master_seed: 17,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn row_count_and_order() {
        let rows = run_experiment(&small(vec![Method::Random, Method::Exact, Method::Rtwpa])).unwrap();
        assert_eq!(rows.len(), 9);
        let ids: Vec<_> = rows.iter().map(|r| (r.scenario_id, r.method)).collect();
        assert_eq!(ids[0], (1, Method::Exact));
        assert_eq!(ids[1], (1, Method::Rtwpa));
        assert_eq!(ids[2], (1, Method::Random));
        for chunk in rows.chunks(3) {
            assert!(chunk[0].peak <= chunk[1].peak);
            assert!(chunk[0].peak <= chunk[2].peak);
        }
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let mut a = small(vec![Method::Exact, Method::Random]);
        a.workers = Some(1);
        let mut b = a.clone();
        b.workers = Some(3);
        let strip = |rows: Vec<BenchRow>| {
            rows.into_iter()
                .map(|r| BenchRow { runtime_ms: 0.0, ..r })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(run_experiment(&a).unwrap()), strip(run_experiment(&b).unwrap()));
    }

    fn row(s: usize, method: Method, peak: f64) -> BenchRow {
        BenchRow {
            robots: 2,
            tasks: 1,
            scenario_id: s,
            method,
            peak,
            runtime_ms: 1.0,
            proved_optimal: true,
        }
    }

    #[test]
    fn summary_popr() {
        let rows = vec![row(1, Method::Exact, 12.0), row(1, Method::Random, 22.0)];
        let sum = summarize(&rows, Method::Random).unwrap();
        assert_eq!(sum.len(), 2);
        assert_eq!(sum[0].method, Method::Exact);
        assert!((sum[0].mean_popr - 45.4545).abs() < 1e-3);
        assert_eq!(sum[1].mean_popr, 0.0);

        let same = vec![row(1, Method::Exact, 5.0), row(1, Method::Random, 5.0)];
        assert!(summarize(&same, Method::Random).unwrap().iter().all(|s| s.mean_popr == 0.0));

        let missing = vec![row(1, Method::Exact, 5.0)];
        assert!(matches!(summarize(&missing, Method::Random), Err(Error::MissingBaseline { .. })));
    }

    #[test]
    fn unproven_scenarios_are_dropped() {
        let mut rows = vec![
            row(1, Method::Exact, 5.0),
            row(1, Method::Random, 6.0),
            row(2, Method::Exact, 5.0),
            row(2, Method::Random, 7.0),
        ];
        rows[2].proved_optimal = false;
        let (kept, dropped) = exclude_unproven(&rows);
        assert_eq!(dropped, 1);
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn profiles_csv() {
        let s = scenario_a();
        let exact = solve_exact(&s, None).unwrap();
        let asap = solve_asap(&s).unwrap();
        let csv = dump_profiles(&s, &[exact, asap]).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "slot,exact,asap");
        assert_eq!(lines.len(), 7);
        for col in 1..=2 {
            let total: f64 = lines[1..]
                .iter()
                .map(|l| l.split(',').nth(col).unwrap().parse::<f64>().unwrap())
                .sum();
            assert_eq!(total, s.total_volume());
        }
    }

    #[test]
    fn csv_headers() {
        let rows = vec![row(1, Method::Exact, 5.0)];
        let text = rows_to_csv(&rows).unwrap();
        assert!(text.starts_with("robots,tasks,scenario_id,method,peak,runtime_ms,proved_optimal\n2,1,1,exact,5.0,1.0,true\n"));
        let sum = summarize(&[row(1, Method::Random, 4.0)], Method::Random).unwrap();
        assert!(summary_to_csv(&sum)
            .unwrap()
            .starts_with("robots,tasks,method,mean_peak,mean_popr,mean_runtime_ms\n"));
    }
}
