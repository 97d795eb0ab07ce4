//! CSV and JSON serialization of report rows.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::run::{summarize, PremiseLine, ReportRow, Summary};

pub const CSV_COLUMNS: [&str; 13] = [
    "theorem",
    "function",
    "family",
    "n",
    "exponent",
    "point_mode",
    "empirical_error",
    "bound",
    "slack",
    "modulus_quality",
    "verdict",
    "slope",
    "r2",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        let b = &r.report;
        w.write_record([
            b.theorem.to_string(),
            r.label.clone(),
            b.family.to_string(),
            b.n.to_string(),
            b.exponent.to_string(),
            b.point_mode.to_string(),
            b.empirical_error.to_string(),
            b.bound.to_string(),
            b.slack().to_string(),
            b.modulus_quality.to_string(),
            b.verdict.to_string(),
            opt(r.slope),
            opt(r.r2),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Document<'a> {
    schema_version: u32,
    summary: Summary,
    rows: &'a [ReportRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    premises: Option<&'a [PremiseLine]>,
}

pub fn write_json<W: Write>(rows: &[ReportRow], premises: Option<&[PremiseLine]>, out: W) -> serde_json::Result<()> {
    let doc = Document { schema_version: crate::config::SCHEMA_VERSION, summary: summarize(rows), rows, premises };
    serde_json::to_writer_pretty(out, &doc)
}

pub fn to_file(path: &Path, f: impl FnOnce(std::fs::File) -> Result<(), String>) -> Result<(), String> {
    let file = std::fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
    f(file)
}
