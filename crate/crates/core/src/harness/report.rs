use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::experiment::ExperimentReport;

/// Column order of the CSV export, consumed by the plotting scripts.
pub const CSV_HEADER: [&str; 10] = [
    "setup", "K", "T", "runs", "alg", "params", "errors", "freq", "ci_half", "seed",
];

/// One CSV line. Failed algorithms leave `errors`, `freq` and `ci_half` empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub setup: String,
    #[serde(rename = "K")]
    pub num_arms: usize,
    #[serde(rename = "T")]
    pub budget: u64,
    pub runs: u64,
    pub alg: String,
    pub params: String,
    pub errors: Option<u64>,
    pub freq: Option<f64>,
    pub ci_half: Option<f64>,
    pub seed: u64,
}

impl ExperimentReport {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.results
            .iter()
            .map(|r| CsvRow {
                setup: self.setup.clone(),
                num_arms: self.num_arms,
                budget: self.budget,
                runs: self.runs,
                alg: r.alg.clone(),
                params: r.params.clone(),
                errors: r.errors,
                freq: r.freq,
                ci_half: r.ci_half,
                seed: self.root_seed,
            })
            .collect()
    }

    /// Plain-text table for terminals.
    pub fn render_table(&self) -> String {
        let mut out = format!(
            "{} K={} T={} runs={} seed={}\n",
            self.setup, self.num_arms, self.budget, self.runs, self.root_seed
        );
        let _ = writeln!(out, "{:<24} {:>8} {:>10} {:>10}", "algorithm", "errors", "freq", "ci95");
        for r in &self.results {
            match (&r.failure, r.errors, r.freq, r.ci_half) {
                (None, Some(e), Some(f), Some(c)) => {
                    let _ = writeln!(out, "{:<24} {e:>8} {f:>10.5} {c:>10.5}", r.name());
                }
                (failure, ..) => {
                    let msg = failure.as_deref().unwrap_or("no result");
                    let _ = writeln!(out, "{:<24} failed: {msg}", r.name());
                }
            }
        }
        out
    }
}

fn io_error(e: impl std::fmt::Display) -> Error {
    Error::Unknown(format!("report I/O: {e}"))
}

/// Writes the rows of every report under a single header.
pub fn write_csv<W: Write>(reports: &[ExperimentReport], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER).map_err(io_error)?;
    for row in reports.iter().flat_map(ExperimentReport::csv_rows) {
        w.serialize(row).map_err(io_error)?;
    }
    w.flush().map_err(io_error)
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(io_error)?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        return Err(Error::Unknown(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(io_error)).collect()
}

/// Writes a JSON array of reports.
pub fn write_json<W: Write>(reports: &[ExperimentReport], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, reports).map_err(io_error)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(Box<ExperimentReport>),
    Many(Vec<ExperimentReport>),
}

/// Reads a JSON array of reports, or a single report object.
pub fn read_json<R: Read>(input: R) -> Result<Vec<ExperimentReport>> {
    match serde_json::from_reader(input).map_err(io_error)? {
        OneOrMany::One(r) => Ok(vec![*r]),
        OneOrMany::Many(v) => Ok(v),
    }
}
