//! Corpus loading, batch evaluation, statistics and benchmarking.

mod bench;
mod evaluate;
pub mod stats;
pub mod synthetic;

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use bench::{
    benchmark, BenchOptions, MetricTiming, RecordCalls, TimingTable, MIN_BENCH_RECORDS,
};
pub use evaluate::{
    evaluate_corpus, CorpusReport, EvalOptions, GroupStats, MetricCorrelation, MetricStats,
    RecordResult, TimingSummary, METRICS,
};
pub use stats::{correlations, Coefficient, Correlation};

use crate::error::CorpusError;

/// One ground-truth / hypothesis pair of a corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub gt: String,
    pub h: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Tsv,
}

impl Format {
    /// Guesses from the file extension; anything but `.tsv` is JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsv") => Format::Tsv,
            _ => Format::Jsonl,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(Format::Jsonl),
            "tsv" => Ok(Format::Tsv),
            other => Err(format!(
                "unknown corpus format {other:?} (expected jsonl or tsv)"
            )),
        }
    }
}

pub fn load_corpus(path: &Path, format: Format) -> Result<Vec<CorpusRecord>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&text, format)
}

/// Parses corpus text. Blank lines are skipped; line numbers in errors are
/// 1-based.
pub fn parse_corpus(text: &str, format: Format) -> Result<Vec<CorpusRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record = match format {
            Format::Jsonl => parse_json_line(line, line_no)?,
            Format::Tsv => parse_tsv_line(line, line_no)?,
        };
        if !seen.insert(record.id.clone()) {
            return Err(CorpusError::DuplicateId {
                id: record.id,
                line: line_no,
            });
        }
        records.push(record);
    }
    Ok(records)
}

fn parse_json_line(line: &str, line_no: usize) -> Result<CorpusRecord, CorpusError> {
    serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
        line: line_no,
        message: e.to_string(),
    })
}

fn parse_tsv_line(line: &str, line_no: usize) -> Result<CorpusRecord, CorpusError> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let cols: Vec<&str> = line.split('\t').collect();
    if !(3..=4).contains(&cols.len()) {
        return Err(CorpusError::Malformed {
            line: line_no,
            message: format!(
                "expected 3 or 4 tab-separated columns, found {}",
                cols.len()
            ),
        });
    }
    if cols[0].is_empty() {
        return Err(CorpusError::Malformed {
            line: line_no,
            message: "empty id".into(),
        });
    }
    Ok(CorpusRecord {
        id: cols[0].to_string(),
        gt: cols[1].to_string(),
        h: cols[2].to_string(),
        group: cols.get(3).filter(|g| !g.is_empty()).map(|g| g.to_string()),
    })
}
