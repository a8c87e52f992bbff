//! Result files: per-trial CSV, JSON summaries and two-column series.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::run::TrialRecord;
use crate::summary::Summary;
use crate::HarnessError;

pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CSV_HEADER: &str = "trial,seed,sweep,algorithm,power_mw,power_dbm,feasible,iterations,wall_ms,l_opt,beta";

/// Summaries keyed by algorithm tag, plus `(sweep, mean dBm)` curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryDocument {
    pub algorithms: BTreeMap<String, Vec<Summary>>,
    pub series: BTreeMap<String, Vec<[f64; 2]>>,
}

impl SummaryDocument {
    pub fn new(summaries: &[Summary]) -> Self {
        let mut algorithms: BTreeMap<String, Vec<Summary>> = BTreeMap::new();
        let mut series: BTreeMap<String, Vec<[f64; 2]>> = BTreeMap::new();
        for s in summaries {
            let tag = s.algorithm.as_str().to_string();
            algorithms.entry(tag.clone()).or_default().push(s.clone());
            let curve = series.entry(tag).or_default();
            if let Some(m) = s.mean_dbm {
                curve.push([s.sweep, m]);
            }
        }
        Self { algorithms, series }
    }
}

fn io(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

pub fn write_records(records: &[TrialRecord], path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(|e| io(path, e))?;
    w.write_record(CSV_HEADER.split(',')).map_err(|e| io(path, e))?;
    for r in records {
        w.serialize(r).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

/// Parses a records file; the channel fingerprint is not stored and reads back as 0.
pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io(path, e))?;
    let header: Vec<String> = r.headers().map_err(|e| io(path, e))?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(HarnessError::Config(format!("{}: unexpected header {}", path.display(), header.join(","))));
    }
    r.deserialize().map(|row| row.map_err(|e| io(path, e))).collect()
}

/// Writes `records.csv`, `summary.json` and one `series_<tag>.csv` per
/// algorithm into `dir`, creating it if needed.
pub fn emit(records: &[TrialRecord], summaries: &[Summary], dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    let records_path = dir.join(RECORDS_FILE);
    write_records(records, &records_path)?;
    written.push(records_path);

    let doc = SummaryDocument::new(summaries);
    let summary_path = dir.join(SUMMARY_FILE);
    let text = serde_json::to_string_pretty(&doc).map_err(|e| io(&summary_path, e))?;
    fs::write(&summary_path, text).map_err(|e| io(&summary_path, e))?;
    written.push(summary_path);

    for (tag, curve) in &doc.series {
        let path = dir.join(format!("series_{tag}.csv"));
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
        w.write_record(["sweep", "mean_dbm"]).map_err(|e| io(&path, e))?;
        for [x, y] in curve {
            w.write_record([x.to_string(), y.to_string()]).map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
