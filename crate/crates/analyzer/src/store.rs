//! JSONL persistence: one meta object on the first line, then one record
//! per line. Line-atomic appends keep interrupted runs parseable.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::AnalyzerError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostInfo {
    pub cpu_model: String,
    pub core_count: usize,
    pub memory_bytes: u64,
}

impl HostInfo {
    /// Describes the machine the harness is running on.
    pub fn probe() -> HostInfo {
        let cpu_model = std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|s| {
                s.lines()
                    .find(|l| l.starts_with("model name"))
                    .and_then(|l| l.split(':').nth(1))
                    .map(|m| m.trim().to_string())
            })
            .unwrap_or_else(|| "unknown".to_string());
        let memory_bytes = std::fs::read_to_string("/proc/meminfo")
            .ok()
            .and_then(|s| {
                s.lines()
                    .find(|l| l.starts_with("MemTotal:"))
                    .and_then(|l| l.split_whitespace().nth(1))
                    .and_then(|kb| kb.parse::<u64>().ok())
            })
            .map(|kb| kb * 1024)
            .unwrap_or(0);
        HostInfo {
            cpu_model,
            core_count: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
            memory_bytes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMeta {
    pub schema_version: u32,
    pub experiment_id: String,
    /// Unix seconds at experiment start.
    pub timestamp_s: u64,
    pub host: HostInfo,
    /// Checksum of the serialized configuration this run used.
    pub config_hash: String,
    pub repetitions: u32,
}

impl ExperimentMeta {
    pub fn new(experiment_id: &str, config_json: &str, repetitions: u32) -> ExperimentMeta {
        ExperimentMeta {
            schema_version: SCHEMA_VERSION,
            experiment_id: experiment_id.to_string(),
            timestamp_s: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            host: HostInfo::probe(),
            config_hash: format!("{:016x}", lumos_core::fnv1a64(config_json.as_bytes())),
            repetitions,
        }
    }
}

/// Writes meta plus records as JSONL; returns the record count.
pub fn persist_records<T: Serialize>(
    meta: &ExperimentMeta,
    records: &[T],
    path: &Path,
) -> Result<usize, AnalyzerError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "{}", serde_json::to_string(meta).expect("meta serializes"))?;
    for record in records {
        writeln!(
            file,
            "{}",
            serde_json::to_string(record).expect("record serializes")
        )?;
    }
    file.flush()?;
    Ok(records.len())
}

/// Loads a JSONL file written by [`persist_records`]. Errors name the
/// offending 1-based line.
pub fn load_records<T: DeserializeOwned>(
    path: &Path,
) -> Result<(ExperimentMeta, Vec<T>), AnalyzerError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let (_, first) = lines.next().ok_or(AnalyzerError::Malformed {
        line: 1,
        message: "empty file, expected a meta line".into(),
    })?;
    let meta: ExperimentMeta =
        serde_json::from_str(&first?).map_err(|e| AnalyzerError::Malformed {
            line: 1,
            message: e.to_string(),
        })?;
    if meta.schema_version != SCHEMA_VERSION {
        return Err(AnalyzerError::SchemaVersion {
            found: meta.schema_version,
            expected: SCHEMA_VERSION,
        });
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(&line).map_err(|e| AnalyzerError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok((meta, records))
}
