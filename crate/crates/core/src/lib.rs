//! Peak-rate scheduling of periodic robot communication tasks.
//!
//! Every robot repeats an ordered chain of transmission tasks once per
//! period. Each task has a rate, a duration in slots, and minimum/maximum
//! idle gaps to its successor; the last task must also leave its minimum gap
//! before the period ends. All robots share one link, and the goal is to
//! choose start slots that minimize the highest aggregate rate in any slot.
//!
//! * [`model`]: scenarios, schedules, time windows, validation, profiles.
//! * [`exact`]: branch and bound that proves the optimal peak.
//! * [`rtwpa`]: best of `N` random placements inside the task windows.
//! * [`baselines`]: uncoordinated random and as-soon-as-possible placements.
//! * [`oracle`]: exhaustive enumeration for small instances.
//! * [`lp`]: export of the integer program for external MILP solvers.
//! * [`generate`] and [`bench`]: seeded instances and experiment sweeps.
//!
//! ```
//! use peakslot::model::{Scenario, TaskSpec};
//! use peakslot::exact::solve_exact;
//!
//! let scenario = Scenario::from_tasks(
//!     6,
//!     vec![
//!         vec![TaskSpec::new(2.0, 2, 1, None)],
//!         vec![TaskSpec::new(3.0, 2, 1, None)],
//!     ],
//! )
//! .unwrap();
//! let report = solve_exact(&scenario, None).unwrap();
//! assert_eq!(report.peak, 3.0);
//! assert!(report.proved_optimal);
//! ```

pub mod baselines;
pub mod bench;
pub mod error;
pub mod exact;
pub mod generate;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod report;
pub mod rtwpa;
pub mod seeding;

pub use error::{Error, Result};
pub use model::{Scenario, Schedule, TaskSpec, TrafficProfile};
pub use report::{Method, SolveReport};
