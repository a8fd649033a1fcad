//! JSON and CSV serialization of verification reports.

use serde::Serialize;

use crate::verify::{Outcome, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CheckJson<'a> {
    name: &'a str,
    params: &'a str,
    pass: bool,
    skipped: bool,
    counterexample: Option<&'a [u64]>,
    elapsed_ms: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ReportJson<'a> {
    m: u64,
    heaps: usize,
    bound: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_cells: Option<usize>,
    checks: Vec<CheckJson<'a>>,
}

fn to_json(report: &VerificationReport) -> ReportJson<'_> {
    ReportJson {
        m: report.m,
        heaps: report.heaps,
        bound: report.bound,
        p_cells: report.p_cells,
        checks: report
            .checks
            .iter()
            .map(|c| CheckJson {
                name: &c.name,
                params: &c.params,
                pass: c.outcome == Outcome::Pass,
                skipped: c.outcome == Outcome::Skipped,
                counterexample: c.counterexample.as_deref(),
                elapsed_ms: round_ms(c.elapsed_ms),
            })
            .collect(),
    }
}

fn round_ms(ms: f64) -> f64 {
    (ms * 1000.0).round() / 1000.0
}

pub const CSV_HEADER: [&str; 9] = [
    "m", "heaps", "bound", "name", "params", "pass", "skipped", "counterexample", "elapsedMs",
];

/// Serializes one or more reports. A single JSON report is an object,
/// several are an array; CSV always has one header row and one row per check.
pub fn emit_reports(reports: &[VerificationReport], format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = if let [one] = reports {
                serde_json::to_vec_pretty(&to_json(one))
            } else {
                serde_json::to_vec_pretty(&reports.iter().map(to_json).collect::<Vec<_>>())
            }
            .expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).expect("in-memory write");
            for r in reports {
                for c in &r.checks {
                    let ce = c
                        .counterexample
                        .as_ref()
                        .map(|v| v.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
                        .unwrap_or_default();
                    w.write_record([
                        r.m.to_string(),
                        r.heaps.to_string(),
                        r.bound.to_string(),
                        c.name.clone(),
                        c.params.clone(),
                        (c.outcome == Outcome::Pass).to_string(),
                        (c.outcome == Outcome::Skipped).to_string(),
                        ce,
                        format!("{:.3}", c.elapsed_ms),
                    ])
                    .expect("in-memory write");
                }
            }
            w.into_inner().expect("in-memory flush")
        }
    }
}

pub fn emit_report(report: &VerificationReport, format: Format) -> Vec<u8> {
    emit_reports(std::slice::from_ref(report), format)
}
