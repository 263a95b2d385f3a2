//! CSV and plot emission.
//!
//! metrics.csv columns: config_id, run, epoch, metric_name, value.
//! summary.csv columns: config_id, epoch, metric_name, mean, q25, q50, q75.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::plot::{density_scatter_svg, learning_curve_svg, CurveSeries};
use super::runner::MetricRow;
use super::summary::SummaryRow;

pub fn write_metrics_csv(path: impl AsRef<Path>, rows: &[MetricRow]) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::DataFormat {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    for row in rows {
        writer.serialize(row).map_err(|e| Error::DataFormat {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
    }
    // Headers even when there are no rows.
    if rows.is_empty() {
        writer
            .write_record(["config_id", "run", "epoch", "metric_name", "value"])
            .map_err(|e| Error::DataFormat {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
    }
    writer.flush().map_err(|e| Error::io(path.display(), e))
}

pub fn read_metrics_csv(path: impl AsRef<Path>) -> Result<Vec<MetricRow>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::DataFormat {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    reader
        .deserialize()
        .map(|r| {
            r.map_err(|e| Error::DataFormat {
                path: path.display().to_string(),
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn write_summary_csv(path: impl AsRef<Path>, rows: &[SummaryRow]) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::DataFormat {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    for row in rows {
        writer.serialize(row).map_err(|e| Error::DataFormat {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
    }
    if rows.is_empty() {
        writer
            .write_record([
                "config_id",
                "epoch",
                "metric_name",
                "mean",
                "q25",
                "q50",
                "q75",
            ])
            .map_err(|e| Error::DataFormat {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
    }
    writer.flush().map_err(|e| Error::io(path.display(), e))
}

pub fn read_summary_csv(path: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::DataFormat {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    reader
        .deserialize()
        .map(|r| {
            r.map_err(|e| Error::DataFormat {
                path: path.display().to_string(),
                reason: e.to_string(),
            })
        })
        .collect()
}

/// Learning-curve series per metric, one curve per config.
fn curve_series(summaries: &[SummaryRow]) -> BTreeMap<String, Vec<CurveSeries>> {
    let mut by_metric: BTreeMap<String, BTreeMap<String, Vec<(f64, f64, f64, f64)>>> =
        BTreeMap::new();
    for row in summaries {
        by_metric
            .entry(row.metric_name.clone())
            .or_default()
            .entry(row.config_id.clone())
            .or_default()
            .push((row.epoch as f64, row.mean, row.q25, row.q75));
    }
    by_metric
        .into_iter()
        .map(|(metric, configs)| {
            let series = configs
                .into_iter()
                .map(|(label, mut points)| {
                    points.sort_by(|a, b| a.0.total_cmp(&b.0));
                    CurveSeries { label, points }
                })
                .collect();
            (metric, series)
        })
        .collect()
}

/// Per-run (config, initial density, final density) triples for the scatter.
fn density_endpoints(metrics: &[MetricRow]) -> Vec<(String, f64, f64)> {
    let mut per_run: BTreeMap<(String, usize), BTreeMap<usize, f64>> = BTreeMap::new();
    for row in metrics {
        if row.metric_name == "density" {
            per_run
                .entry((row.config_id.clone(), row.run))
                .or_default()
                .insert(row.epoch, row.value);
        }
    }
    per_run
        .into_iter()
        .filter_map(|((config, _), by_epoch)| {
            let first = by_epoch.iter().next()?;
            let last = by_epoch.iter().next_back()?;
            (first.0 != last.0).then(|| (config, *first.1, *last.1))
        })
        .collect()
}

/// Writes metrics.csv, summary.csv, one learning-curve SVG per metric, and
/// the density scatter when more than one initial density appears. Returns
/// the paths written. Empty metrics produce headers-only CSVs, a warning,
/// and no plots.
pub fn emit_outputs(
    metrics: &[MetricRow],
    summaries: &[SummaryRow],
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display(), e))?;
    let mut written = Vec::new();

    let metrics_path = out_dir.join("metrics.csv");
    write_metrics_csv(&metrics_path, metrics)?;
    written.push(metrics_path);
    let summary_path = out_dir.join("summary.csv");
    write_summary_csv(&summary_path, summaries)?;
    written.push(summary_path);

    if metrics.is_empty() {
        eprintln!(
            "warning: no metrics to plot; wrote headers-only CSVs to {}",
            out_dir.display()
        );
        return Ok(written);
    }

    for (metric, series) in curve_series(summaries) {
        let svg = learning_curve_svg(&metric, &series);
        let path = out_dir.join(format!("learning_curve_{metric}.svg"));
        fs::write(&path, svg).map_err(|e| Error::io(path.display(), e))?;
        written.push(path);
    }

    let endpoints = density_endpoints(metrics);
    let distinct_initial: std::collections::BTreeSet<u64> = endpoints
        .iter()
        .map(|(_, initial, _)| initial.to_bits())
        .collect();
    if distinct_initial.len() > 1 {
        let path = out_dir.join("density_scatter.svg");
        fs::write(&path, density_scatter_svg(&endpoints))
            .map_err(|e| Error::io(path.display(), e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::summary::summarize;

    fn row(config: &str, run: usize, epoch: usize, metric: &str, value: f64) -> MetricRow {
        MetricRow {
            config_id: config.to_string(),
            run,
            epoch,
            metric_name: metric.to_string(),
            value,
        }
    }

    #[test]
    fn metrics_csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metrics.csv");
        let rows = vec![
            row("a", 0, 0, "nll", 1.0 / 3.0),
            row("a", 1, 20, "density", 0.1234567890123456789),
            row("b,with comma", 0, 1, "nll", -5.5e-17),
        ];
        write_metrics_csv(&path, &rows).unwrap();
        let back = read_metrics_csv(&path).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn summary_csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.csv");
        let rows = vec![
            row("a", 0, 0, "nll", 0.25),
            row("a", 1, 0, "nll", 0.75),
        ];
        let summary = summarize(&rows);
        write_summary_csv(&path, &summary).unwrap();
        assert_eq!(read_summary_csv(&path).unwrap(), summary);
    }

    #[test]
    fn empty_metrics_give_headers_only_and_no_plots() {
        let dir = tempfile::tempdir().unwrap();
        let written = emit_outputs(&[], &[], dir.path()).unwrap();
        assert_eq!(written.len(), 2);
        let metrics = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        assert_eq!(metrics.trim(), "config_id,run,epoch,metric_name,value");
        assert!(!dir.path().join("learning_curve_nll.svg").exists());
    }

    #[test]
    fn emits_plots_per_metric_and_density_scatter() {
        let dir = tempfile::tempdir().unwrap();
        let mut rows = Vec::new();
        for (cfg, d0) in [("sparse", 0.1), ("dense", 1.0)] {
            for run in 0..3 {
                rows.push(row(cfg, run, 0, "nll", 4.0 + run as f64));
                rows.push(row(cfg, run, 10, "nll", 2.0 + run as f64));
                rows.push(row(cfg, run, 0, "density", d0));
                rows.push(row(cfg, run, 10, "density", 0.4));
            }
        }
        let summary = summarize(&rows);
        let written = emit_outputs(&rows, &summary, dir.path()).unwrap();
        assert!(dir.path().join("learning_curve_nll.svg").exists());
        assert!(dir.path().join("learning_curve_density.svg").exists());
        assert!(dir.path().join("density_scatter.svg").exists());
        assert!(written.len() >= 5);

        // Deterministic bytes on re-emission.
        let first = std::fs::read(dir.path().join("learning_curve_nll.svg")).unwrap();
        emit_outputs(&rows, &summary, dir.path()).unwrap();
        let second = std::fs::read(dir.path().join("learning_curve_nll.svg")).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn single_initial_density_skips_scatter() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            row("a", 0, 0, "density", 0.5),
            row("a", 0, 10, "density", 0.4),
        ];
        let summary = summarize(&rows);
        emit_outputs(&rows, &summary, dir.path()).unwrap();
        assert!(!dir.path().join("density_scatter.svg").exists());
    }
}
