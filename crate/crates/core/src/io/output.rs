use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentReport, OutputFormat};

/// Opens `path` for writing, refusing to replace an existing file.
fn create_new(path: &Path) -> Result<BufWriter<File>> {
    let file = OpenOptions::new().write(true).create_new(true).open(path)?;
    Ok(BufWriter::new(file))
}

/// One header line plus one row per item, comma separated, LF endings.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(create_new(path)?);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = create_new(path)?;
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create_new(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ReportHead<'a> {
    kind: &'a str,
    seed: u64,
    scalars: &'a std::collections::BTreeMap<String, f64>,
    checks: &'a std::collections::BTreeMap<String, bool>,
    violations: &'a std::collections::BTreeMap<String, u64>,
}

/// Writes `<kind>_records.{jsonl,csv}`, `<kind>_summary.{csv,jsonl}` per
/// `format`, and `<kind>_report.json` with scalars, checks and violation
/// counters. Returns the paths written, in order.
pub fn write_report<R: Serialize, S: Serialize>(
    dir: &Path,
    report: &ExperimentReport<R, S>,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let kind = report.kind.name();
    let mut written = Vec::new();
    let path = |suffix: &str| dir.join(format!("{kind}_{suffix}"));
    if matches!(format, OutputFormat::Jsonl | OutputFormat::Both) {
        written.push(path("records.jsonl"));
        write_jsonl(written.last().unwrap(), &report.records)?;
        written.push(path("summary.jsonl"));
        write_jsonl(written.last().unwrap(), &report.summary)?;
    }
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        written.push(path("records.csv"));
        write_csv(written.last().unwrap(), &report.records)?;
        written.push(path("summary.csv"));
        write_csv(written.last().unwrap(), &report.summary)?;
    }
    written.push(path("report.json"));
    let head = ReportHead {
        kind,
        seed: report.seed,
        scalars: &report.scalars,
        checks: &report.checks,
        violations: &report.violations,
    };
    write_json(written.last().unwrap(), &head)?;
    Ok(written)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl OutputFile {
    pub fn describe(path: &Path) -> Result<Self> {
        let data = std::fs::read(path)?;
        Ok(OutputFile {
            path: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            bytes: data.len() as u64,
            sha256: hex::encode(Sha256::digest(&data)),
        })
    }
}

/// Provenance of one run. Timestamps are milliseconds since the Unix epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub artifact_version: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub total_violations: u64,
    pub files: Vec<OutputFile>,
}

pub fn unix_ms() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}
