use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use peakslot::baselines::{solve_asap, solve_random};
use peakslot::bench::{self, BenchConfig};
use peakslot::exact::solve_exact;
use peakslot::generate::{bundled_example, generate, GenParams};
use peakslot::lp::export_lp;
use peakslot::oracle::{solve_oracle, DEFAULT_ORACLE_CAP};
use peakslot::rtwpa::{solve_rtwpa, RtwpaConfig, DEFAULT_ITERATIONS};
use peakslot::{Error, Method, Scenario, Schedule, SolveReport};

const EXIT_INVALID: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_UNPROVEN: u8 = 4;

/// Peak-rate scheduling of periodic robot communication tasks.
#[derive(Parser)]
#[command(name = "peakslot", version)]
struct Cli {
    /// Suppress the summary on standard output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random scenario or write a bundled example.
    Generate(GenerateArgs),
    /// Schedule a scenario.
    Solve(SolveArgs),
    /// Check a schedule against a scenario.
    Validate(ValidateArgs),
    /// Write the integer program in CPLEX LP format.
    ExportLp(ExportLpArgs),
    /// Run an experiment sweep.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 2, conflicts_with = "example")]
    robots: usize,
    #[arg(long, default_value_t = 1, conflicts_with = "example")]
    tasks: usize,
    #[arg(long, default_value_t = 15, conflicts_with = "example")]
    period: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draw real-valued rates instead of whole numbers.
    #[arg(long)]
    continuous_rates: bool,
    /// Name of a bundled example (welding_palletiser).
    #[arg(long)]
    example: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "exact", value_parser = parse_method)]
    method: Method,
    /// Seconds before the exact solver returns its incumbent.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Schedule output (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-slot aggregate rate (CSV).
    #[arg(long)]
    profile_out: Option<PathBuf>,
    /// Exit with status 4 if optimality was not proved.
    #[arg(long)]
    require_optimal: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
}

#[derive(Args)]
struct ExportLpArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated ROBOTS:TASKS cells.
    #[arg(long, value_delimiter = ',', value_parser = parse_cell)]
    cells: Option<Vec<(usize, usize)>>,
    #[arg(long, default_value_t = 100)]
    scenarios_per_cell: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "exact,rtwpa,random")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 120.0)]
    exact_time_limit: f64,
    #[arg(long, default_value = "random", value_parser = parse_method)]
    baseline: Method,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: u64,
    /// Comma-separated ROBOTS:TASKS:SCENARIO instances to dump profiles for.
    #[arg(long, value_delimiter = ',', value_parser = parse_instance)]
    profiles: Vec<(usize, usize, usize)>,
    /// Write 0 for every runtime so repeated runs are byte-identical.
    #[arg(long)]
    no_timings: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out_dir: PathBuf,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn parse_cell(s: &str) -> Result<(usize, usize), String> {
    let (i, j) = s.split_once(':').ok_or_else(|| format!("expected ROBOTS:TASKS, got `{s}`"))?;
    let num = |v: &str| v.parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((num(i)?, num(j)?))
}

fn parse_instance(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [i, j, k] = parts[..] else {
        return Err(format!("expected ROBOTS:TASKS:SCENARIO, got `{s}`"));
    };
    let num = |v: &str| v.parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((num(i)?, num(j)?, num(k)?))
}

fn seconds(s: f64) -> anyhow::Result<Duration> {
    Duration::try_from_secs_f64(s).with_context(|| format!("bad time limit {s}"))
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_scenario(path: &Path) -> anyhow::Result<Scenario> {
    Scenario::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Outcome that is not an error but still maps to a nonzero status.
enum Outcome {
    Ok,
    Status(u8),
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let say = |line: String| {
        if !cli.quiet {
            println!("{line}");
        }
    };
    match cli.command {
        Command::Generate(a) => {
            let scenario = match &a.example {
                Some(name) => bundled_example(name)?,
                None => generate(&GenParams {
                    period: a.period,
                    robots: a.robots,
                    tasks_per_robot: a.tasks,
                    seed: a.seed,
                    continuous_rates: a.continuous_rates,
                    ..GenParams::default()
                })?,
            };
            write(&a.out, &scenario.to_json())?;
            say(format!(
                "robots={} tasks={} period={} volume={}",
                scenario.num_robots(),
                scenario.num_tasks(),
                scenario.period(),
                scenario.total_volume()
            ));
        }
        Command::Solve(a) => {
            let scenario = load_scenario(&a.scenario)?;
            if a.require_optimal && !matches!(a.method, Method::Exact | Method::Oracle) {
                bail!("--require-optimal needs --method exact or oracle");
            }
            let report: SolveReport = match a.method {
                Method::Exact => solve_exact(&scenario, a.time_limit.map(seconds).transpose()?)?,
                Method::Rtwpa => solve_rtwpa(&scenario, RtwpaConfig::new(a.iterations, a.seed))?,
                Method::Random => solve_random(&scenario, a.seed)?,
                Method::Asap => solve_asap(&scenario)?,
                Method::Oracle => solve_oracle(&scenario, DEFAULT_ORACLE_CAP)?,
            };
            if let Some(out) = &a.out {
                write(out, &report.schedule.to_json())?;
            }
            if let Some(out) = &a.profile_out {
                write(out, &scenario.traffic_profile(&report.schedule)?.to_csv())?;
            }
            say(report.summary_line());
            if a.require_optimal && !report.proved_optimal {
                eprintln!("optimality not proved within the time limit");
                return Ok(Outcome::Status(EXIT_UNPROVEN));
            }
        }
        Command::Validate(a) => {
            let scenario = load_scenario(&a.scenario)?;
            let schedule = Schedule::from_json(&read(&a.schedule)?)
                .with_context(|| format!("parsing {}", a.schedule.display()))?;
            let violations = scenario.validate_schedule(&schedule)?;
            if !violations.is_empty() {
                for v in &violations {
                    println!("violation: {v}");
                }
                return Ok(Outcome::Status(EXIT_INVALID));
            }
            let profile = scenario.traffic_profile(&schedule)?;
            say(format!("valid=true peak={}", profile.peak));
        }
        Command::ExportLp(a) => {
            let scenario = load_scenario(&a.scenario)?;
            write(&a.out, &export_lp(&scenario))?;
            say(format!("variables={}", peakslot::lp::variable_count(&scenario)));
        }
        Command::Bench(a) => {
            let defaults = BenchConfig::default();
            let config = BenchConfig {
                cells: a.cells.unwrap_or(defaults.cells),
                scenarios_per_cell: a.scenarios_per_cell,
                methods: a.methods,
                master_seed: a.seed,
                exact_time_limit: Some(seconds(a.exact_time_limit)?),
                baseline_method: a.baseline,
                rtwpa_iterations: a.iterations,
                workers: a.workers,
                ..defaults
            };
            if !config.methods.contains(&config.baseline_method) {
                bail!("baseline `{}` is not among --methods", config.baseline_method);
            }
            let experiment = bench::run_experiment_keeping(&config, &a.profiles)?;
            let mut rows = experiment.rows;
            if a.no_timings {
                rows.iter_mut().for_each(|r| r.runtime_ms = 0.0);
            }
            let summary = bench::summarize(&rows, config.baseline_method)?;
            fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
            write(&a.out_dir.join("rows.csv"), &bench::rows_to_csv(&rows)?)?;
            write(&a.out_dir.join("summary.csv"), &bench::summary_to_csv(&summary)?)?;
            for ((i, j, s), scenario, reports) in &experiment.kept {
                let name = format!("profile_{i}_{j}_{s}.csv");
                write(&a.out_dir.join(name), &bench::dump_profiles(scenario, reports)?)?;
            }
            let (_, unproven) = bench::exclude_unproven(&rows);
            say(format!(
                "rows={} cells={} unproven={} out_dir={}",
                rows.len(),
                config.cells.len(),
                unproven,
                a.out_dir.display()
            ));
        }
    }
    Ok(Outcome::Ok)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let mut e = err.downcast_ref::<Error>();
    while let Some(Error::Experiment { source, .. }) = e {
        e = Some(source);
    }
    match e {
        Some(Error::Infeasible { .. } | Error::InfeasibleParams { .. }) => EXIT_INFEASIBLE,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Status(code)) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
