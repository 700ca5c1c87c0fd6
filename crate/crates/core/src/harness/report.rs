//! Report data model: per-check records, scenario reports, and their JSON
//! and markdown renderings.
//!
//! Field names and order are stable; JSON output is byte-deterministic for a
//! fixed (scenario, seed, samples) triple because every residual and witness
//! is produced by a scheduling-independent reduction and `runtime_ms` stays
//! at zero unless wall-clock timing was explicitly requested.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

/// One verified claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// Stable identifier, also the key for tolerance overrides.
    pub id: String,
    /// What was computed and what makes it pass.
    pub description: String,
    /// The claim this check exercises, carried from catalog provenance.
    pub paper_ref: String,
    pub status: CheckStatus,
    /// Worst observed residual; `None` for skipped checks.
    pub max_residual: Option<f64>,
    /// Effective tolerance after overrides; `None` for skipped checks.
    pub tolerance: Option<f64>,
    /// Worst point / parameters / auxiliary data; `null` when not relevant.
    pub witness: Value,
    /// Wall-clock milliseconds, or 0 unless timings were requested.
    pub runtime_ms: u64,
}

/// Result of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    /// Base sample count identity-style checks ran with.
    pub samples: usize,
    pub checks: Vec<Check>,
    pub overall: CheckStatus,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(
        scenario: &str,
        seed: u64,
        samples: usize,
        checks: Vec<Check>,
        warnings: Vec<String>,
    ) -> Report {
        let overall = if checks.iter().any(|c| c.status == CheckStatus::Fail) {
            CheckStatus::Fail
        } else {
            CheckStatus::Pass
        };
        Report {
            scenario: scenario.to_string(),
            seed,
            samples,
            checks,
            overall,
            warnings,
        }
    }

    pub fn passed(&self) -> bool {
        self.overall == CheckStatus::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# {} — {}\n\nseed {}, {} samples\n\n",
            self.scenario,
            status_word(self.overall),
            self.seed,
            self.samples
        ));
        out.push_str("| check | status | max residual | tolerance | ms | description |\n");
        out.push_str("|-------|--------|--------------|-----------|---:|-------------|\n");
        for c in &self.checks {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} |\n",
                c.id,
                status_word(c.status),
                fmt_opt(c.max_residual),
                fmt_opt(c.tolerance),
                c.runtime_ms,
                c.description.replace('|', "\\|"),
            ));
        }
        let failed: Vec<&Check> = self
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .collect();
        if !failed.is_empty() {
            out.push_str("\nFailed checks:\n");
            for c in failed {
                out.push_str(&format!(
                    "- `{}` ({}): witness {}\n",
                    c.id, c.paper_ref, c.witness
                ));
            }
        }
        if !self.warnings.is_empty() {
            out.push_str("\nWarnings:\n");
            for w in &self.warnings {
                out.push_str(&format!("- {w}\n"));
            }
        }
        out
    }
}

/// Renders a batch of reports as one JSON document (array) or concatenated
/// markdown sections.
pub fn render_reports(reports: &[Report], markdown: bool) -> String {
    if markdown {
        let sections: Vec<String> = reports.iter().map(Report::to_markdown).collect();
        sections.join("\n")
    } else if reports.len() == 1 {
        reports[0].to_json()
    } else {
        let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn status_word(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "FAIL",
        CheckStatus::Skip => "skip",
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.3e}"),
        None => "—".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample_report() -> Report {
        Report::new(
            "demo",
            7,
            250,
            vec![
                Check {
                    id: "demo.ok".to_string(),
                    description: "identity residual stays small".to_string(),
                    paper_ref: "demo claim".to_string(),
                    status: CheckStatus::Pass,
                    max_residual: Some(3.5e-12),
                    tolerance: Some(1e-10),
                    witness: json!({ "point": [0.25, -0.5] }),
                    runtime_ms: 0,
                },
                Check {
                    id: "demo.skipped".to_string(),
                    description: "not applicable here".to_string(),
                    paper_ref: "demo claim".to_string(),
                    status: CheckStatus::Skip,
                    max_residual: None,
                    tolerance: None,
                    witness: Value::Null,
                    runtime_ms: 0,
                },
            ],
            vec!["low statistical coverage: only 250 samples per identity check".to_string()],
        )
    }

    #[test]
    fn json_output_round_trips_to_an_equal_report() {
        let report = sample_report();
        let parsed: Report = serde_json::from_str(&report.to_json()).expect("reparses");
        assert_eq!(parsed, report);
    }

    #[test]
    fn overall_status_fails_exactly_when_a_check_fails() {
        let mut report = sample_report();
        assert!(report.passed());
        report.checks[0].status = CheckStatus::Fail;
        let rebuilt = Report::new(
            &report.scenario,
            report.seed,
            report.samples,
            report.checks.clone(),
            report.warnings.clone(),
        );
        assert!(!rebuilt.passed());
        assert_eq!(rebuilt.overall, CheckStatus::Fail);
    }

    #[test]
    fn markdown_lists_failed_checks_with_their_witnesses() {
        let mut report = sample_report();
        report.checks[0].status = CheckStatus::Fail;
        let report = Report::new(
            &report.scenario,
            report.seed,
            report.samples,
            report.checks.clone(),
            report.warnings.clone(),
        );
        let md = report.to_markdown();
        assert!(md.contains("Failed checks:"));
        assert!(md.contains("demo.ok"));
        assert!(md.contains("0.25"));
        assert!(md.contains("Warnings:"));
    }

    #[test]
    fn a_batch_of_reports_renders_as_a_json_array() {
        let reports = vec![sample_report(), sample_report()];
        let doc = render_reports(&reports, false);
        let parsed: Vec<Report> = serde_json::from_str(&doc).expect("array of reports");
        assert_eq!(parsed, reports);
        let single = render_reports(&reports[..1], false);
        assert_eq!(single, reports[0].to_json());
    }
}
