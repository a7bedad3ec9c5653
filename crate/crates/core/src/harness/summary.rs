use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::mean_std;
use super::run::{write_file, TraceRow};
use super::{ExperimentSpec, HarnessError, FINAL_DAYS};

/// Final-days statistics of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub point: usize,
    pub value: Option<f64>,
    /// Mean over traces of each trace's final-days normalized cost.
    pub mean: f64,
    /// Population standard deviation across traces.
    pub std: f64,
    pub per_trace: Vec<f64>,
    /// Traces that played every requested day.
    pub complete_traces: usize,
    /// Mean share of the state-action space with a table entry (tabular
    /// controllers only).
    pub visited_pair_fraction: Option<f64>,
    pub visited_states: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub agent: String,
    pub experiment: String,
    pub days: usize,
    pub traces: usize,
    pub seed: u64,
    pub final_days: usize,
    pub points: Vec<PointSummary>,
}

fn mean_of<T: Copy>(rows: &[&TraceRow], f: impl Fn(&TraceRow) -> Option<T>, to_f64: impl Fn(T) -> f64) -> Option<f64> {
    let values: Option<Vec<f64>> = rows.iter().map(|r| f(r).map(&to_f64)).collect();
    values.filter(|v| !v.is_empty()).map(|v| mean_std(&v).0)
}

/// Groups trace rows by sweep point. Rows may come in any order.
pub fn build_summary(spec: &ExperimentSpec, rows: &[TraceRow]) -> Summary {
    let mut rows: Vec<&TraceRow> = rows.iter().collect();
    rows.sort_by_key(|r| (r.point, r.trace));
    let mut points = Vec::new();
    for chunk in rows.chunk_by(|a, b| a.point == b.point) {
        let per_trace: Vec<f64> = chunk.iter().map(|r| r.final_cost).collect();
        let (mean, std) = mean_std(&per_trace);
        let fraction = mean_of(
            chunk,
            |r| Some(r.visited_pairs? as f64 / r.total_pairs?),
            |v| v,
        );
        points.push(PointSummary {
            point: chunk[0].point,
            value: chunk[0].value,
            mean,
            std,
            per_trace,
            complete_traces: chunk.iter().filter(|r| r.days_completed == spec.days).count(),
            visited_pair_fraction: fraction,
            visited_states: mean_of(chunk, |r| r.visited_states, |v| v as f64),
        });
    }
    Summary {
        agent: spec.agent.to_string(),
        experiment: spec.experiment.to_string(),
        days: spec.days,
        traces: spec.traces,
        seed: spec.seed,
        final_days: FINAL_DAYS,
        points,
    }
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        write_file(path, &self.to_json())
    }

    /// Mean final cost of the first point.
    pub fn headline(&self) -> f64 {
        self.points.first().map_or(f64::NAN, |p| p.mean)
    }
}

/// Rebuilds the summary of a finished run directory from its `spec.txt` and
/// `traces.csv`.
pub fn summarize(dir: &Path) -> Result<Summary, HarnessError> {
    let spec = ExperimentSpec::from_file(dir.join("spec.txt"))?;
    let mut reader = csv::Reader::from_path(dir.join("traces.csv"))?;
    let rows: Vec<TraceRow> = reader.deserialize().collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Err(HarnessError::Empty(dir.display().to_string()));
    }
    Ok(build_summary(&spec, &rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(point: usize, trace: usize, cost: f64) -> TraceRow {
        TraceRow {
            point,
            value: None,
            trace,
            seed: trace as u64,
            days_completed: 416,
            final_cost: cost,
            visited_pairs: None,
            total_pairs: None,
            visited_states: None,
        }
    }

    #[test]
    fn means_per_point() {
        let spec = ExperimentSpec::default();
        let s = build_summary(&spec, &[row(0, 1, 0.9), row(0, 0, 0.7)]);
        assert_eq!(s.points.len(), 1);
        assert!((s.points[0].mean - 0.8).abs() < 1e-15);
        assert_eq!(s.points[0].per_trace, vec![0.7, 0.9]);
        assert_eq!(s.points[0].complete_traces, 2);
        assert_eq!(s.points[0].visited_pair_fraction, None);

        let s = build_summary(&spec, &[row(0, 0, 0.8)]);
        assert_eq!((s.points[0].mean, s.points[0].std), (0.8, 0.0));
    }

    #[test]
    fn visited_fraction() {
        let mut r = row(0, 0, 0.5);
        r.visited_pairs = Some(5);
        r.total_pairs = Some(1000.0);
        r.visited_states = Some(3);
        let s = build_summary(&ExperimentSpec::default(), &[r]);
        assert_eq!(s.points[0].visited_pair_fraction, Some(0.005));
        assert_eq!(s.points[0].visited_states, Some(3.0));
    }
}
