//! Experiment results and their on-disk form (CSV tables + JSON manifest).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dynamics::RunReport;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Numeric column; non-numeric cells are skipped.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        Some(self.column(name)?.into_iter().filter_map(Cell::as_f64).collect())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Numerical-hygiene summary over every evolution in a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub max_truncation_leakage: f64,
    pub max_trace_drift: f64,
    pub max_norm_drift: f64,
    pub max_purity_increase: f64,
    pub min_eigenvalue: Option<f64>,
    pub density_promotions: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Diagnostics {
    pub fn absorb(&mut self, r: &RunReport) {
        self.max_truncation_leakage = self.max_truncation_leakage.max(r.max_leakage);
        self.max_trace_drift = self.max_trace_drift.max(r.max_trace_drift);
        self.max_norm_drift = self.max_norm_drift.max(r.max_norm_drift);
        self.max_purity_increase = self.max_purity_increase.max(r.max_purity_increase);
        if r.min_eigenvalue.is_finite() {
            self.min_eigenvalue = Some(self.min_eigenvalue.map_or(r.min_eigenvalue, |m| m.min(r.min_eigenvalue)));
        }
        self.density_promotions += r.promotions.len();
        self.accepted_steps += r.accepted_steps;
        self.rejected_steps += r.rejected_steps;
    }

    pub fn merge(&mut self, o: &Diagnostics) {
        self.max_truncation_leakage = self.max_truncation_leakage.max(o.max_truncation_leakage);
        self.max_trace_drift = self.max_trace_drift.max(o.max_trace_drift);
        self.max_norm_drift = self.max_norm_drift.max(o.max_norm_drift);
        self.max_purity_increase = self.max_purity_increase.max(o.max_purity_increase);
        if let Some(m) = o.min_eigenvalue {
            self.min_eigenvalue = Some(self.min_eigenvalue.map_or(m, |x| x.min(m)));
        }
        self.density_promotions += o.density_promotions;
        self.accepted_steps += o.accepted_steps;
        self.rejected_steps += o.rejected_steps;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub experiment: String,
    pub seed: u64,
    pub config_hash: String,
    pub parameters: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, f64>,
    pub tables: Vec<Table>,
    /// Extra text files: (file name, contents).
    pub artifacts: Vec<(String, String)>,
    pub diagnostics: Diagnostics,
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    code_version: &'a str,
    config_hash: &'a str,
    seed: u64,
    rng: &'a str,
    parameters: &'a BTreeMap<String, String>,
    metrics: BTreeMap<&'a str, Option<f64>>,
    diagnostics: &'a Diagnostics,
    files: Vec<String>,
}

impl ExperimentResult {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn manifest_json(&self) -> String {
        let files = self
            .tables
            .iter()
            .map(|t| format!("{}.csv", t.name))
            .chain(self.artifacts.iter().map(|(n, _)| n.clone()))
            .collect();
        let m = Manifest {
            experiment: &self.experiment,
            code_version: env!("CARGO_PKG_VERSION"),
            config_hash: &self.config_hash,
            seed: self.seed,
            rng: crate::RNG_NAME,
            parameters: &self.parameters,
            // JSON has no NaN; non-finite metrics become null
            metrics: self
                .metrics
                .iter()
                .map(|(k, v)| (k.as_str(), v.is_finite().then_some(*v)))
                .collect(),
            diagnostics: &self.diagnostics,
            files,
        };
        serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n"
    }

    /// Writes `manifest.json`, one CSV per table and the artifacts into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in &self.tables {
            let p = dir.join(format!("{}.csv", t.name));
            t.write_csv(&p)?;
            written.push(p);
        }
        for (name, text) in &self.artifacts {
            let p = dir.join(name);
            std::fs::write(&p, text)?;
            written.push(p);
        }
        let p = dir.join("manifest.json");
        std::fs::write(&p, self.manifest_json())?;
        written.push(p);
        Ok(written)
    }
}
