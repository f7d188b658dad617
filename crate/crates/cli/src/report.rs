//! Suite reports: per-case records, summary counts, and deterministic
//! JSON/CSV emission.
//!
//! Reports are byte-stable for a fixed config: cases are sorted by their
//! key before serialization and the wall clock is printed to stdout rather
//! than written into the file.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

/// One verified case.
#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    /// Deterministic case key (also the sort key).
    pub case: String,
    /// Name of the identity or bound being checked.
    pub identity: String,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub tolerance: f64,
    /// Hard assertions drive the exit status; monitored ones only report.
    pub hard: bool,
    pub pass: bool,
}

impl CaseResult {
    pub fn compare(
        case: String,
        identity: &str,
        lhs: Complex64,
        rhs: Complex64,
        tolerance: f64,
        relative: bool,
        hard: bool,
    ) -> Self {
        let abs_diff = (lhs - rhs).norm();
        let rel_diff = abs_diff / (1.0 + lhs.norm());
        let pass = if relative { rel_diff <= tolerance } else { abs_diff <= tolerance };
        Self {
            case,
            identity: identity.to_string(),
            lhs_re: lhs.re,
            lhs_im: lhs.im,
            rhs_re: rhs.re,
            rhs_im: rhs.im,
            abs_diff,
            rel_diff,
            tolerance,
            hard,
            pass,
        }
    }

    /// A scalar bound check: value ≤ bound.
    pub fn bound(case: String, identity: &str, value: f64, bound: f64, hard: bool) -> Self {
        Self {
            case,
            identity: identity.to_string(),
            lhs_re: value,
            lhs_im: 0.0,
            rhs_re: bound,
            rhs_im: 0.0,
            abs_diff: (value - bound).max(0.0),
            rel_diff: if bound != 0.0 { (value / bound).max(0.0) } else { f64::INFINITY },
            tolerance: bound,
            hard,
            pass: value <= bound,
        }
    }
}

/// Totals over the case list.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub hard_failed: usize,
    pub monitored_failed: usize,
}

/// A full suite report.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    /// Echo of the effective configuration.
    pub config: toml::Value,
    pub summary: Summary,
    /// Free-form notes (skipped tuples, monitored observations).
    pub notes: Vec<String>,
    pub cases: Vec<CaseResult>,
    #[serde(skip)]
    pub wall_clock: std::time::Duration,
}

impl VerificationReport {
    pub fn new(suite: &str, config: toml::Value) -> Self {
        Self {
            suite: suite.to_string(),
            config,
            summary: Summary::default(),
            notes: Vec::new(),
            cases: Vec::new(),
            wall_clock: std::time::Duration::ZERO,
        }
    }

    pub fn push(&mut self, case: CaseResult) {
        self.cases.push(case);
    }

    pub fn note(&mut self, note: String) {
        self.notes.push(note);
    }

    /// Sort cases, recount the summary. Call once all cases are in.
    pub fn finalize(&mut self) {
        self.cases.sort_by(|a, b| a.case.cmp(&b.case).then(a.identity.cmp(&b.identity)));
        self.notes.sort();
        let mut s = Summary { total: self.cases.len(), ..Default::default() };
        for c in &self.cases {
            if c.pass {
                s.passed += 1;
            } else if c.hard {
                s.hard_failed += 1;
            } else {
                s.monitored_failed += 1;
            }
        }
        self.summary = s;
    }

    pub fn all_hard_passed(&self) -> bool {
        self.summary.hard_failed == 0
    }

    /// Merge another suite's cases and notes (for the `all` runner).
    pub fn absorb(&mut self, mut other: VerificationReport) {
        self.cases.append(&mut other.cases);
        self.notes.append(&mut other.notes);
        self.wall_clock += other.wall_clock;
    }
}

/// Output format of `emit_report`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Write the report; byte-stable for identical content.
pub fn emit_report(
    report: &VerificationReport,
    format: ReportFormat,
    path: &Path,
) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    match format {
        ReportFormat::Json => {
            let json = serde_json::to_string_pretty(report)?;
            file.write_all(json.as_bytes())?;
            file.write_all(b"\n")?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(file);
            for c in &report.cases {
                w.serialize(c)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_counts_match_cases() {
        let mut r = VerificationReport::new("demo", toml::Value::String("cfg".into()));
        r.push(CaseResult::bound("b".into(), "x", 1.0, 2.0, true));
        r.push(CaseResult::bound("a".into(), "x", 3.0, 2.0, true));
        r.push(CaseResult::bound("c".into(), "x", 3.0, 2.0, false));
        r.finalize();
        assert_eq!(r.summary.total, 3);
        assert_eq!(r.summary.passed, 1);
        assert_eq!(r.summary.hard_failed, 1);
        assert_eq!(r.summary.monitored_failed, 1);
        assert_eq!(r.cases[0].case, "a");
        assert!(!r.all_hard_passed());
    }

    #[test]
    fn emission_is_byte_stable() {
        let dir = std::env::temp_dir();
        let p1 = dir.join("deltasum_report_test_1.json");
        let p2 = dir.join("deltasum_report_test_2.json");
        let mut r = VerificationReport::new("demo", toml::Value::String("cfg".into()));
        r.push(CaseResult::bound("k".into(), "x", 1.0, 2.0, true));
        r.finalize();
        emit_report(&r, ReportFormat::Json, &p1).unwrap();
        r.wall_clock = std::time::Duration::from_secs(7); // must not leak into the file
        emit_report(&r, ReportFormat::Json, &p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        let parsed: serde_json::Value =
            serde_json::from_slice(&std::fs::read(&p1).unwrap()).unwrap();
        assert_eq!(parsed["suite"], "demo");
        std::fs::remove_file(p1).ok();
        std::fs::remove_file(p2).ok();
    }
}
