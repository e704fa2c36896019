//! Check records, suite reports and their on-disk form.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rankone::ModelName;
use serde::{Deserialize, Serialize};

use crate::config::Settings;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Above,
}

impl Comparison {
    fn holds(self, residual: f64, tolerance: f64) -> bool {
        match self {
            Comparison::Below => residual < tolerance,
            Comparison::AtMost => residual <= tolerance,
            Comparison::Above => residual > tolerance,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Comparison::Below => "<",
            Comparison::AtMost => "<=",
            Comparison::Above => ">",
        }
    }
}

/// Outcome of one identity check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    /// `null` in JSON when the computation failed.
    pub residual: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub runtime: Duration,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, anchor: &str, residual: f64, tolerance: f64, comparison: Comparison) -> Self {
        CheckRecord {
            id: id.into(),
            anchor: anchor.into(),
            residual,
            tolerance,
            comparison,
            passed: residual.is_finite() && comparison.holds(residual, tolerance),
            note: None,
            runtime: Duration::ZERO,
        }
    }

    pub fn below(id: impl Into<String>, anchor: &str, residual: f64, tolerance: f64) -> Self {
        Self::new(id, anchor, residual, tolerance, Comparison::Below)
    }

    pub fn at_most(id: impl Into<String>, anchor: &str, residual: f64, tolerance: f64) -> Self {
        Self::new(id, anchor, residual, tolerance, Comparison::AtMost)
    }

    pub fn above(id: impl Into<String>, anchor: &str, residual: f64, tolerance: f64) -> Self {
        Self::new(id, anchor, residual, tolerance, Comparison::Above)
    }

    /// A check whose computation returned an error.
    pub fn errored(id: impl Into<String>, anchor: &str, tolerance: f64, error: impl std::fmt::Display) -> Self {
        let mut r = Self::below(id, anchor, f64::NAN, tolerance);
        r.note = Some(error.to_string());
        r
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub model: ModelName,
    pub seed: u64,
    pub parameters: Settings,
    pub records: Vec<CheckRecord>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn new(suite: &str, parameters: Settings, mut records: Vec<CheckRecord>) -> Self {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let passed = !records.is_empty() && records.iter().all(|r| r.passed);
        VerificationReport {
            suite: suite.into(),
            model: parameters.run.model,
            seed: parameters.run.seed,
            parameters,
            records,
            passed,
        }
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.passed).count()
    }

    pub fn file_name(&self) -> String {
        format!("{}-{}-seed{}.json", self.suite, self.model, self.seed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable table for standard output.
    pub fn table(&self) -> String {
        let width = self.records.iter().map(|r| r.id.len()).max().unwrap_or(2).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "suite {} on {} (seed {})", self.suite, self.model, self.seed);
        let _ = writeln!(out, "{:<width$}  {:>11}    {:>9}  {:>8}  status", "check", "residual", "tolerance", "time");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{:<width$}  {:>11.3e} {:>2} {:>9.1e}  {:>7.2}s  {}",
                r.id,
                r.residual,
                r.comparison.symbol(),
                r.tolerance,
                r.runtime.as_secs_f64(),
                if r.passed { "pass" } else { "FAIL" }
            );
            if let Some(n) = &r.note {
                let _ = writeln!(out, "{:<width$}    note: {n}", "");
            }
        }
        let _ = writeln!(
            out,
            "overall: {} ({} checks, {} failed)",
            if self.passed { "PASS" } else { "FAIL" },
            self.records.len(),
            self.failures()
        );
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub file: String,
    pub suite: String,
    pub model: ModelName,
    pub seed: u64,
    pub passed: bool,
    pub checks: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ReportIndex {
    pub reports: Vec<IndexEntry>,
}

/// Writes the report into `dir` and records it in `dir/index.json`; returns the report path.
pub fn write_report(dir: &Path, report: &VerificationReport) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(report.file_name());
    std::fs::write(&path, report.to_json())?;
    let index_path = dir.join("index.json");
    let mut index: ReportIndex = match std::fs::read_to_string(&index_path) {
        Ok(s) => serde_json::from_str(&s).unwrap_or_default(),
        Err(_) => ReportIndex::default(),
    };
    let entry = IndexEntry {
        file: report.file_name(),
        suite: report.suite.clone(),
        model: report.model,
        seed: report.seed,
        passed: report.passed,
        checks: report.records.len(),
        failed: report.failures(),
    };
    index.reports.retain(|e| e.file != entry.file);
    index.reports.push(entry);
    index.reports.sort_by(|a, b| a.file.cmp(&b.file));
    let mut s = serde_json::to_string_pretty(&index).expect("index serializes");
    s.push('\n');
    std::fs::write(index_path, s)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_residuals_fail() {
        assert!(!CheckRecord::below("x", "", f64::NAN, 1.0).passed);
        assert!(!CheckRecord::above("x", "", f64::NAN, 1.0).passed);
        assert!(CheckRecord::at_most("x", "", 0.0, 0.0).passed);
    }

    #[test]
    fn overall_status_is_conjunction() {
        let s = Settings::defaults(ModelName::H2R);
        let ok = VerificationReport::new(
            "t",
            s.clone(),
            vec![CheckRecord::below("b", "", 0.0, 1.0), CheckRecord::below("a", "", 0.0, 1.0)],
        );
        assert!(ok.passed);
        assert_eq!(ok.records[0].id, "a");
        let bad = VerificationReport::new(
            "t",
            s,
            vec![CheckRecord::below("a", "", 2.0, 1.0), CheckRecord::below("b", "", 0.0, 1.0)],
        );
        assert!(!bad.passed);
    }

    #[test]
    fn runtime_is_not_serialized() {
        let mut r = CheckRecord::below("a", "", 0.5, 1.0);
        r.runtime = Duration::from_secs(3);
        let json = serde_json::to_string(&r).unwrap();
        assert!(!json.contains("runtime"));
        assert!(json.contains("\"comparison\":\"<\""));
    }
}
