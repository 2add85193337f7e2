use thiserror::Error;

use crate::model::Slot;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("schedule shape does not match scenario: {0}")]
    ShapeMismatch(String),

    #[error("empty time window for robot {robot} task {task}: earliest {es} > latest {ls}")]
    WindowEmpty {
        robot: usize,
        task: usize,
        es: Slot,
        ls: Slot,
    },

    #[error("scenario is infeasible: robot {robot} needs {demand} slots but its period is {period}")]
    Infeasible {
        robot: usize,
        demand: u64,
        period: u32,
    },

    #[error("baseline peak is zero, percentage reduction undefined")]
    ZeroBaseline,

    #[error("least common multiple of periods ({lcm}) exceeds cap {cap}")]
    Overflow { lcm: u64, cap: u64 },

    #[error("enumeration estimate {estimate} exceeds cap {cap}")]
    CapExceeded { estimate: f64, cap: u64 },

    #[error("could not sample a feasible scenario after {attempts} attempts: smallest demand {demand} > period {period}")]
    InfeasibleParams {
        attempts: u32,
        demand: u64,
        period: u32,
    },

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error("unknown bundled example `{0}`")]
    UnknownExample(String),

    #[error("missing baseline `{method}` row for robots={robots} tasks={tasks} scenario={scenario}")]
    MissingBaseline {
        method: String,
        robots: usize,
        tasks: usize,
        scenario: usize,
    },

    #[error("cell I={robots} J={tasks} scenario {scenario}")]
    Experiment {
        robots: usize,
        tasks: usize,
        scenario: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
