use std::fs::{self, File};
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::DragAgent;
use crate::baselines::{Sota, StaticKind, StaticPolicy, TabularAC, TabularConfig, TabularQ};
use crate::env::{CostBreakdown, Environment};
use crate::policy::{play_slot, Policy, PolicyStats};
use crate::{derive_seed, SimRng};

use super::metrics::{daily_metrics, final_mean, moving_average, DailyMetric};
use super::summary::{build_summary, Summary};
use super::{AgentKind, ExperimentSpec, HarnessError, FINAL_DAYS, SMOOTHING_DAYS};

/// One row of a per-slot CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRow {
    pub slot: u64,
    pub day: usize,
    /// Small-cell modes, `1` for on, station 1 first.
    pub modes: String,
    /// Arrivals, macro cell first, space separated.
    pub arrivals: String,
    pub energy: f64,
    pub delay_cost: f64,
    pub switching_cost: f64,
    pub total: f64,
    pub all_on_total: f64,
}

/// One row of `days.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayRow {
    pub point: usize,
    pub value: Option<f64>,
    pub trace: usize,
    pub seed: u64,
    pub day: usize,
    pub raw_cost: f64,
    pub all_on_cost: f64,
    pub normalized: f64,
    /// Trailing mean of `normalized`.
    pub smoothed: f64,
    pub energy: f64,
    pub delay_cost: f64,
    pub switching_cost: f64,
}

/// One row of `traces.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub point: usize,
    pub value: Option<f64>,
    pub trace: usize,
    pub seed: u64,
    pub days_completed: usize,
    /// Mean normalized cost over the last days played.
    pub final_cost: f64,
    pub visited_pairs: Option<u64>,
    pub total_pairs: Option<f64>,
    pub visited_states: Option<u64>,
}

/// Everything one trace produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub row: TraceRow,
    pub daily: Vec<DailyMetric>,
}

impl TraceResult {
    pub fn normalized(&self) -> Vec<f64> {
        self.daily.iter().map(|d| d.normalized).collect()
    }
}

/// What [`run_experiment`] hands back besides the files.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub summary: Summary,
    /// In `(point, trace)` order.
    pub traces: Vec<TraceResult>,
}

impl ExperimentOutput {
    pub fn trace(&self, point: usize, trace: usize) -> Option<&TraceResult> {
        self.traces.iter().find(|t| t.row.point == point && t.row.trace == trace)
    }
}

#[derive(Debug, Clone, Copy)]
struct Job {
    point: usize,
    value: f64,
    trace: usize,
}

enum AnyPolicy {
    Drag(Box<DragAgent>),
    Other(Box<dyn Policy + Send>),
}

impl AnyPolicy {
    fn as_policy(&mut self) -> &mut dyn Policy {
        match self {
            AnyPolicy::Drag(a) => a.as_mut(),
            AnyPolicy::Other(p) => p.as_mut(),
        }
    }
}

/// Seed of trace `trace`.
pub fn trace_seed(master: u64, trace: usize) -> u64 {
    master ^ trace as u64
}

fn build_policy(spec: &ExperimentSpec, job: Job, seed: u64) -> Result<AnyPolicy, HarnessError> {
    let (scenario, drag) = spec.point(job.value);
    let policy_seed = derive_seed(seed, 1);
    let tabular = || TabularConfig::default();
    Ok(match spec.agent {
        AgentKind::Drag => AnyPolicy::Drag(Box::new(DragAgent::new(&scenario, drag, policy_seed)?)),
        AgentKind::Ql => AnyPolicy::Other(Box::new(TabularQ::new(
            &scenario,
            tabular(),
            SimRng::seed_from_u64(policy_seed),
        ))),
        AgentKind::TactStyle => AnyPolicy::Other(Box::new(TabularAC::new(
            &scenario,
            tabular(),
            SimRng::seed_from_u64(policy_seed),
        ))),
        AgentKind::Sota => AnyPolicy::Other(Box::new(Sota::new(&scenario)?)),
        AgentKind::AllOn => AnyPolicy::Other(Box::new(StaticPolicy::new(StaticKind::AllOn, scenario.n_sbs))),
        AgentKind::AllOff => AnyPolicy::Other(Box::new(StaticPolicy::new(StaticKind::AllOff, scenario.n_sbs))),
    })
}

fn join_f64(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(f64::to_string).collect();
    parts.join(" ")
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> HarnessError + '_ {
    move |e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn slot_file(out: &Path, job: Job) -> PathBuf {
    out.join("slots").join(format!("p{:02}_t{:02}.csv", job.point, job.trace))
}

fn run_trace(spec: &ExperimentSpec, job: Job, out: &Path, deadline: Option<Instant>) -> Result<TraceResult, HarnessError> {
    let (scenario, _) = spec.point(job.value);
    let seed = trace_seed(spec.seed, job.trace);
    let mut env = Environment::new(scenario.clone(), seed)?;
    let mut env_on = Environment::new(scenario.clone(), seed)?;
    let mut policy = build_policy(spec, job, seed)?;
    let mut all_on = StaticPolicy::new(StaticKind::AllOn, scenario.n_sbs);

    let path = slot_file(out, job);
    let mut writer = csv::Writer::from_path(&path)?;
    let per_day = scenario.slots_per_day;
    let mut costs: Vec<CostBreakdown> = Vec::with_capacity(spec.total_slots());
    let mut on_costs: Vec<CostBreakdown> = Vec::with_capacity(spec.total_slots());
    let mut days_completed = 0;

    for day in 0..spec.days {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            if let AnyPolicy::Drag(agent) = &policy {
                let ckpt = out.join("checkpoints").join(format!("p{:02}_t{:02}.ckpt", job.point, job.trace));
                fs::write(&ckpt, agent.checkpoint()).map_err(io_err(&ckpt))?;
            }
            break;
        }
        if spec.shifts_at(day) {
            env.pattern_shift();
            env_on.pattern_shift();
        }
        for _ in 0..per_day {
            let (action, outcome) = play_slot(policy.as_policy(), &mut env);
            let (_, on) = play_slot(&mut all_on, &mut env_on);
            debug_assert_eq!(outcome.arrivals, on.arrivals);
            let c = outcome.cost;
            writer.serialize(SlotRow {
                slot: outcome.slot,
                day,
                modes: action.to_string(),
                arrivals: join_f64(outcome.arrivals.as_slice()),
                energy: c.energy,
                delay_cost: c.delay_cost,
                switching_cost: c.switching_cost,
                total: c.total,
                all_on_total: on.cost.total,
            })?;
            costs.push(c);
            on_costs.push(on.cost);
        }
        days_completed += 1;
    }
    writer.flush().map_err(io_err(&path))?;

    let daily = daily_metrics(&costs, &on_costs, per_day);
    let normalized: Vec<f64> = daily.iter().map(|d| d.normalized).collect();
    let final_cost = if normalized.is_empty() {
        f64::NAN
    } else {
        final_mean(&normalized, FINAL_DAYS)
    };
    let PolicyStats {
        visited_pairs,
        total_pairs,
        visited_states,
    } = policy.as_policy().stats();
    Ok(TraceResult {
        row: TraceRow {
            point: job.point,
            value: point_value(job.value),
            trace: job.trace,
            seed,
            days_completed,
            final_cost,
            visited_pairs,
            total_pairs,
            visited_states,
        },
        daily,
    })
}

fn point_value(v: f64) -> Option<f64> {
    (!v.is_nan()).then_some(v)
}

/// Runs every `(sweep point, trace)` pair on `workers` threads and writes
/// `spec.txt`, `slots/*.csv`, `days.csv`, `traces.csv` and `summary.json`
/// under `out`. Identical specs give byte-identical files.
pub fn run_experiment(spec: &ExperimentSpec, out: &Path, workers: usize) -> Result<ExperimentOutput, HarnessError> {
    spec.validate()?;
    // fail fast on anything a trace would only discover later
    for value in spec.sweep_points() {
        let (scenario, drag) = spec.point(value);
        scenario.validate()?;
        drag.validate()?;
        Environment::new(scenario.clone(), trace_seed(spec.seed, 0))?;
        if spec.agent == AgentKind::Sota {
            Sota::new(&scenario)?;
        }
    }

    for dir in [out.to_path_buf(), out.join("slots"), out.join("checkpoints")] {
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    }
    let spec_path = out.join("spec.txt");
    fs::write(&spec_path, spec.to_string()).map_err(io_err(&spec_path))?;

    let jobs: Vec<Job> = spec
        .sweep_points()
        .into_iter()
        .enumerate()
        .flat_map(|(point, value)| (0..spec.traces).map(move |trace| Job { point, value, trace }))
        .collect();
    let deadline = spec
        .walltime_secs
        .map(|s| Instant::now() + Duration::from_secs_f64(s));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Workers(e.to_string()))?;
    let traces: Vec<TraceResult> = pool.install(|| {
        jobs.par_iter()
            .map(|&job| run_trace(spec, job, out, deadline))
            .collect::<Result<_, _>>()
    })?;

    write_tables(out, &traces)?;
    let rows: Vec<TraceRow> = traces.iter().map(|t| t.row.clone()).collect();
    let summary = build_summary(spec, &rows);
    summary.write(&out.join("summary.json"))?;
    Ok(ExperimentOutput { summary, traces })
}

fn write_tables(out: &Path, traces: &[TraceResult]) -> Result<(), HarnessError> {
    let mut days = csv::Writer::from_path(out.join("days.csv"))?;
    let mut rows = csv::Writer::from_path(out.join("traces.csv"))?;
    for t in traces {
        let r = &t.row;
        let smoothed = moving_average(&t.normalized(), SMOOTHING_DAYS);
        for (d, s) in t.daily.iter().zip(smoothed) {
            days.serialize(DayRow {
                point: r.point,
                value: r.value,
                trace: r.trace,
                seed: r.seed,
                day: d.day,
                raw_cost: d.raw_cost,
                all_on_cost: d.all_on_cost,
                normalized: d.normalized,
                smoothed: s,
                energy: d.energy,
                delay_cost: d.delay_cost,
                switching_cost: d.switching_cost,
            })?;
        }
        rows.serialize(r)?;
    }
    days.flush().map_err(io_err(&out.join("days.csv")))?;
    rows.flush().map_err(io_err(&out.join("traces.csv")))?;
    Ok(())
}

/// Writes `text` to `path`, creating parent directories.
pub(crate) fn write_file(path: &Path, text: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}
