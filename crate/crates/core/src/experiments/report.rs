//! Suite reports: CSV rows, a JSON summary and a pass/fail manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::Result;

/// One checked inequality or property.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub name: String,
    #[serde(deserialize_with = "nan_from_null")]
    pub value: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub bound: f64,
    pub pass: bool,
}

/// JSON writes non-finite floats as `null`; read them back as NaN.
fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl Predicate {
    /// `value ≤ bound` (fails on NaN).
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, pass: value <= bound }
    }

    /// `value ≥ bound` (fails on NaN).
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, pass: value >= bound }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 1.0 } else { 0.0 }, bound: 1.0, pass: ok }
    }

    /// `|b/a − 1| ≤ tol`; both must be finite and positive.
    pub fn stable(name: impl Into<String>, a: f64, b: f64, tol: f64) -> Self {
        let drift = relative_drift(a, b);
        Self { name: name.into(), value: drift, bound: tol, pass: drift <= tol }
    }
}

/// `|b/a − 1|`, infinite unless both are finite and positive.
pub fn relative_drift(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
        (b / a - 1.0).abs()
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: serde_json::Value,
    pub predicates: Vec<Predicate>,
    /// Recorded member failures; the suite continued past them.
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, columns: &[&str]) -> Self {
        Self { suite: suite.into(), seed, columns: columns.iter().map(|c| c.to_string()).collect(), ..Self::default() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn check(&mut self, p: Predicate) {
        self.predicates.push(p);
    }

    pub fn passed(&self) -> bool {
        self.predicates.iter().all(|p| p.pass)
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.predicates.extend(other.predicates);
        self.failures.extend(other.failures);
    }
}

/// Cell formatting shared by every suite.
pub fn cell(v: f64) -> String {
    format!("{v:e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassManifest {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub predicates: Vec<(String, bool)>,
}

/// Write `<suite>.csv`, `<suite>.json` and `<suite>.pass.json` into `dir`.
/// Returns the paths written.
pub fn emit_report(report: &SuiteReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", report.suite));
    let mut w = csv::Writer::from_path(&csv_path).map_err(csv_error)?;
    w.write_record(&report.columns).map_err(csv_error)?;
    for r in &report.rows {
        w.write_record(r).map_err(csv_error)?;
    }
    w.flush()?;
    let json_path = dir.join(format!("{}.json", report.suite));
    fs::write(&json_path, serde_json::to_string_pretty(report)?)?;
    let pass_path = dir.join(format!("{}.pass.json", report.suite));
    let manifest = PassManifest {
        suite: report.suite.clone(),
        seed: report.seed,
        pass: report.passed(),
        predicates: report.predicates.iter().map(|p| (p.name.clone(), p.pass)).collect(),
    };
    fs::write(&pass_path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(vec![csv_path, json_path, pass_path])
}

/// Every `*.pass.json` manifest in `dir`, sorted by file name.
pub fn collect_manifests(dir: impl AsRef<Path>) -> Result<Vec<PassManifest>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".pass.json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| Ok(serde_json::from_str(&fs::read_to_string(p)?)?)).collect()
}

fn csv_error(e: csv::Error) -> crate::Error {
    crate::Error::Io(std::io::Error::other(e.to_string()))
}
