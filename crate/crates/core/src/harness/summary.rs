//! Per-epoch aggregation across runs: mean and quartiles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::runner::MetricRow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub config_id: String,
    pub epoch: usize,
    pub metric_name: String,
    pub mean: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
}

/// Linear-interpolation percentile of an ascending-sorted slice: the value
/// at fractional rank q·(n−1).
pub fn percentile_linear(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Groups rows by (config, metric, epoch) and reduces each group over runs.
/// Output order is deterministic (sorted by the group key).
pub fn summarize(rows: &[MetricRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(&str, &str, usize), Vec<f64>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((&row.config_id, &row.metric_name, row.epoch))
            .or_default()
            .push(row.value);
    }
    groups
        .into_iter()
        .map(|((config_id, metric_name, epoch), mut values)| {
            values.sort_by(f64::total_cmp);
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            SummaryRow {
                config_id: config_id.to_string(),
                epoch,
                metric_name: metric_name.to_string(),
                mean,
                q25: percentile_linear(&values, 0.25),
                q50: percentile_linear(&values, 0.50),
                q75: percentile_linear(&values, 0.75),
            }
        })
        .collect()
}
