//! Seeded multi-trace experiments and their files.
//!
//! An [`ExperimentSpec`] names a scenario, a controller and a protocol.
//! [`run_experiment`] plays every trace twice from the same seed, once with
//! the controller and once with every small cell on, and normalizes daily
//! costs by the all-on run. It writes:
//!
//! * `spec.txt`: the resolved spec, which parses back to the same spec
//! * `slots/pXX_tYY.csv`: one row per slot for sweep point `XX`, trace `YY`
//! * `days.csv`: daily raw, all-on and normalized cost plus a 10-day
//!   trailing mean
//! * `traces.csv`: per-trace final cost and table statistics
//! * `summary.json`: mean and spread of the final 20 days per sweep point

mod metrics;
mod run;
mod spec;
mod summary;

pub use metrics::{daily_metrics, final_mean, mean_std, moving_average, DailyMetric};
pub use run::{run_experiment, trace_seed, DayRow, ExperimentOutput, SlotRow, TraceResult, TraceRow};
pub use spec::{AgentKind, ExperimentKind, ExperimentSpec};
pub use summary::{build_summary, summarize, PointSummary, Summary};

use thiserror::Error;

use crate::agent::AgentError;
use crate::baselines::TooLarge;
use crate::config::ConfigError;
use crate::env::EnvError;

/// Days averaged for the headline number of a trace.
pub const FINAL_DAYS: usize = 20;
/// Window of the trailing mean in `days.csv`.
pub const SMOOTHING_DAYS: usize = 10;
/// Environment variable read by the command-line tool for the worker count.
pub const WORKERS_VAR: &str = "DRAG_WORKERS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("exhaustive search over {0} small cells is too large")]
    TooLarge(usize),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot start workers: {0}")]
    Workers(String),
    #[error("{0} holds no finished traces")]
    Empty(String),
}

impl From<TooLarge> for HarnessError {
    fn from(e: TooLarge) -> Self {
        HarnessError::TooLarge(e.0)
    }
}

/// Worker count from [`WORKERS_VAR`], falling back to the number of CPUs.
pub fn workers_from_env() -> usize {
    std::env::var(WORKERS_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
