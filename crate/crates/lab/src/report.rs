//! Experiment outcomes and their on-disk artifacts.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::LabError;
use crate::records::SampleRecord;
use crate::stats::Estimate;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesRow {
    pub p: u64,
    pub estimate: Estimate,
}

/// One estimated quantity across scales.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub rows: Vec<SeriesRow>,
}

impl Series {
    pub fn new(label: impl Into<String>) -> Self {
        Series { label: label.into(), rows: Vec::new() }
    }

    pub fn at(&self, p: u64) -> Option<&Estimate> {
        self.rows.iter().find(|r| r.p == p).map(|r| &r.estimate)
    }

    pub fn last(&self) -> Option<&Estimate> {
        self.rows.last().map(|r| &r.estimate)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Per-sample, zero tolerance.
    Exact,
    /// Tolerance in half-widths or binomial bands.
    Statistical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    /// `None` when the check was not evaluated (replay of a single seed).
    pub passed: Option<bool>,
    pub detail: String,
}

/// A sample on which an exact invariant failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub check: String,
    pub seed: u64,
    pub scale: u64,
    pub detail: String,
}

/// A table written verbatim as CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub series: Vec<Series>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub samples: Vec<SampleRecord>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Report { experiment: experiment.to_string(), ..Default::default() }
    }

    /// Record an exact check from its per-sample failures.
    pub fn exact(&mut self, name: &str, evaluated: usize, failures: Vec<Violation>) {
        let passed = failures.is_empty();
        let detail = format!("{} of {} samples violate", failures.len(), evaluated);
        self.checks.push(Check { name: name.to_string(), kind: CheckKind::Exact, passed: Some(passed), detail });
        self.violations.extend(failures);
    }

    /// Record a statistical check; `passed = None` marks it as skipped.
    pub fn statistical(&mut self, name: &str, passed: Option<bool>, detail: String) {
        self.checks.push(Check { name: name.to_string(), kind: CheckKind::Statistical, passed, detail });
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn series(&self, label: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.label == label)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed != Some(false))
    }

    pub fn exact_passed(&self) -> bool {
        self.checks.iter().filter(|c| c.kind == CheckKind::Exact).all(|c| c.passed != Some(false))
    }
}

/// `manifest.json`: everything needed to reproduce the artifacts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub config_sha256: String,
    pub seed_base: u64,
    pub seeds: Vec<u64>,
    pub artifacts: Vec<String>,
    /// The effective configuration, as canonical TOML.
    pub config: String,
}

fn series_file(report: &Report, s: &Series) -> String {
    if report.series.len() == 1 {
        "series.csv".to_string()
    } else {
        let slug: String = s
            .label
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
            .collect();
        format!("series_{slug}.csv")
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), LabError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| LabError::Io(e.into()))?;
    w.write_record(header).map_err(|e| LabError::Io(e.into()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| LabError::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x}")
    }
}

/// Write manifest, series CSVs, extra tables, checks and samples.
pub fn write_artifacts(dir: &Path, cfg: &Config, report: &Report) -> Result<Manifest, LabError> {
    fs::create_dir_all(dir)?;
    let mut artifacts = Vec::new();
    for s in &report.series {
        let name = series_file(report, s);
        let rows = s.rows.iter().map(|r| {
            let e = &r.estimate;
            vec![
                r.p.to_string(),
                fmt_f64(e.mean),
                fmt_f64(e.stddev),
                e.n.to_string(),
                fmt_f64(e.halfwidth),
                e.infinite.to_string(),
            ]
        });
        write_csv(&dir.join(&name), &["p", "mean", "stddev", "n", "halfwidth", "infiniteCount"], rows)?;
        artifacts.push(name);
    }
    for t in &report.tables {
        let name = format!("{}.csv", t.name);
        let header: Vec<&str> = t.header.iter().map(String::as_str).collect();
        write_csv(&dir.join(&name), &header, t.rows.iter().cloned())?;
        artifacts.push(name);
    }
    let mut jsonl = String::new();
    for s in &report.samples {
        jsonl.push_str(&s.to_json_line());
        jsonl.push('\n');
    }
    fs::write(dir.join("samples.jsonl"), jsonl)?;
    artifacts.push("samples.jsonl".into());
    let checks = serde_json::to_string_pretty(report).expect("reports serialize");
    fs::write(dir.join("report.json"), checks + "\n")?;
    artifacts.push("report.json".into());
    let mut seeds: Vec<u64> = report.samples.iter().map(|s| s.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    let manifest = Manifest {
        tool: "fppflow".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: report.experiment.clone(),
        config_sha256: cfg.digest(),
        seed_base: cfg.seed,
        seeds,
        artifacts,
        config: cfg.to_toml(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifests serialize");
    fs::write(dir.join("manifest.json"), text + "\n")?;
    Ok(manifest)
}
