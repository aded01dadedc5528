//! Cartesian-product sweeps executed as independent jobs.

use std::cmp::Ordering;

use super::config::{parse_frequency, parse_number, parse_time, ExperimentConfig};
use super::result::{Cell, Diagnostics, ExperimentResult, Table};
use super::runs::{check_keys, run_experiment, RunContext};
use crate::exec::{map_indexed, Execution};
use crate::{Error, Result};

/// Numeric value of a sweep coordinate in internal units, for sorting.
fn coordinate(raw: &str) -> Option<f64> {
    parse_frequency(raw)
        .ok()
        .or_else(|| parse_time(raw).ok())
        .or_else(|| parse_number(raw).ok())
}

/// All points of the sweep in Cartesian order (last axis fastest).
pub fn sweep_points(cfg: &ExperimentConfig) -> Vec<Vec<(String, String)>> {
    let mut points = vec![Vec::new()];
    for (key, values) in &cfg.sweeps {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((key.clone(), v.clone()));
                    q
                })
            })
            .collect();
    }
    points
}

pub struct SweepResult {
    /// One row per point: axis values, metrics, status.
    pub table: Table,
    pub points: Vec<Result<ExperimentResult>>,
    pub diagnostics: Diagnostics,
}

impl SweepResult {
    /// Packs the table into an [`ExperimentResult`] for writing.
    pub fn into_result(self, cfg: &ExperimentConfig, seed: u64) -> ExperimentResult {
        ExperimentResult {
            experiment: cfg.experiment().to_string(),
            seed,
            config_hash: cfg.hash(),
            parameters: cfg.canonical(),
            metrics: Default::default(),
            tables: vec![self.table],
            artifacts: Vec::new(),
            diagnostics: self.diagnostics,
        }
    }
}

/// Runs every point with generator stream = its Cartesian index; point
/// failures are recorded in the `status` column and do not stop the sweep.
/// Points run concurrently, each one single-threaded.
pub fn run_sweep(cfg: &ExperimentConfig, seed: u64, execution: Execution) -> Result<SweepResult> {
    if cfg.sweeps.is_empty() {
        return Err(Error::Config("sweep needs at least one sweep.<key> axis".into()));
    }
    check_keys(cfg)?;
    let points = sweep_points(cfg);
    let results = map_indexed(execution, points.len(), |i| {
        let point_cfg = cfg.with_overrides(&points[i]);
        let ctx = RunContext {
            seed,
            stream: i as u64,
            execution: Execution::Sequential,
        };
        run_experiment(&point_cfg, &ctx)
    });

    let axes: Vec<&str> = cfg.sweeps.iter().map(|(k, _)| k.as_str()).collect();
    let metric_names: Vec<String> = results
        .iter()
        .find_map(|r| r.as_ref().ok())
        .map(|r| r.metrics.keys().cloned().collect())
        .unwrap_or_default();
    let mut columns: Vec<&str> = axes.clone();
    columns.extend(metric_names.iter().map(String::as_str));
    columns.push("status");
    let mut table = Table::new("sweep", &columns);
    let mut diagnostics = Diagnostics::default();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        for ((_, va), (_, vb)) in points[a].iter().zip(&points[b]) {
            let ord = match (coordinate(va), coordinate(vb)) {
                (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
                _ => va.cmp(vb),
            };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        a.cmp(&b)
    });
    for i in order {
        let mut row: Vec<Cell> = points[i]
            .iter()
            .map(|(_, v)| coordinate(v).map_or_else(|| Cell::Text(v.clone()), Cell::Num))
            .collect();
        match &results[i] {
            Ok(r) => {
                diagnostics.merge(&r.diagnostics);
                row.extend(metric_names.iter().map(|m| Cell::Num(r.metric(m).unwrap_or(f64::NAN))));
                row.push("ok".into());
            }
            Err(e) => {
                row.extend(metric_names.iter().map(|_| Cell::Num(f64::NAN)));
                row.push(Cell::Text(e.to_string().replace(['\n', ','], " ")));
            }
        }
        table.push(row);
    }
    Ok(SweepResult {
        table,
        points: results,
        diagnostics,
    })
}
