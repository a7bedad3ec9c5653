use serde::{Deserialize, Serialize};

use crate::env::CostBreakdown;

/// One day of one trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyMetric {
    pub day: usize,
    /// Mean slot cost of the policy.
    pub raw_cost: f64,
    /// Mean slot cost of the paired all-on run.
    pub all_on_cost: f64,
    pub normalized: f64,
    pub energy: f64,
    pub delay_cost: f64,
    pub switching_cost: f64,
}

/// Averages slot costs into days and divides by the paired all-on days.
pub fn daily_metrics(costs: &[CostBreakdown], all_on: &[CostBreakdown], slots_per_day: usize) -> Vec<DailyMetric> {
    assert_eq!(costs.len(), all_on.len());
    costs
        .chunks_exact(slots_per_day)
        .zip(all_on.chunks_exact(slots_per_day))
        .enumerate()
        .map(|(day, (c, a))| {
            let n = slots_per_day as f64;
            let mean = |f: fn(&CostBreakdown) -> f64, xs: &[CostBreakdown]| xs.iter().map(f).sum::<f64>() / n;
            let raw_cost = mean(|x| x.total, c);
            let all_on_cost = mean(|x| x.total, a);
            DailyMetric {
                day,
                raw_cost,
                all_on_cost,
                normalized: raw_cost / all_on_cost,
                energy: mean(|x| x.energy, c),
                delay_cost: mean(|x| x.delay_cost, c),
                switching_cost: mean(|x| x.switching_cost, c),
            }
        })
        .collect()
}

/// Trailing mean over `window` entries; the first `window - 1` entries
/// average whatever prefix exists.
///
/// ```
/// use hetnet_drag::harness::moving_average;
/// assert_eq!(moving_average(&[1.0, 2.0, 3.0, 4.0], 2), vec![1.0, 1.5, 2.5, 3.5]);
/// ```
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be positive");
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for i in 0..series.len() {
        sum += series[i];
        if i >= window {
            sum -= series[i - window];
        }
        let len = (i + 1).min(window);
        out.push(sum / len as f64);
    }
    out
}

/// Mean of the last `days` entries.
pub fn final_mean(series: &[f64], days: usize) -> f64 {
    assert!(!series.is_empty());
    let tail = &series[series.len().saturating_sub(days)..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
