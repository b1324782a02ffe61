//! Per-cell aggregation of execution records and mode-vs-mode ratio tables.

use std::collections::BTreeMap;

use lumos_core::{PayloadGroup, RuntimeMode, StartKind, WorkloadId};
use lumos_observer::{derive_metrics, ExecutionRecord, MetricSet};
use serde::{Deserialize, Serialize};

use crate::stats::{mean, median, percentile};
use crate::AnalyzerError;

/// One cell of the experiment matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub workload: WorkloadId,
    pub group: PayloadGroup,
    pub mode: RuntimeMode,
    pub start_kind: StartKind,
}

impl CellKey {
    pub fn of(record: &ExecutionRecord) -> CellKey {
        CellKey {
            workload: record.workload,
            group: record.group,
            mode: record.mode,
            start_kind: record.start_kind,
        }
    }

    pub fn label(&self) -> String {
        format!(
            "{:?}/{:?}/{}/{:?}",
            self.workload,
            self.group,
            self.mode.name(),
            self.start_kind
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
}

fn summarize(values: &[f64]) -> Result<MetricSummary, AnalyzerError> {
    Ok(MetricSummary {
        mean: mean(values)?,
        median: median(values)?,
        p95: percentile(values, 95.0)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub key: CellKey,
    /// Valid records contributing to the summaries.
    pub sample_count: usize,
    /// Records dropped for failure status or inconsistent timestamps.
    pub invalid_count: usize,
    pub total_ns: MetricSummary,
    pub cold_start_ns: MetricSummary,
    pub io_latency_ns: MetricSummary,
    pub serialization_ns: MetricSummary,
    pub compute_ns: MetricSummary,
    pub mean_output_len: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub cells: BTreeMap<CellKey, CellStats>,
    /// Fraction of all input records that failed or were inconsistent.
    pub error_rate: f64,
}

impl AggregateReport {
    pub fn cell(&self, key: &CellKey) -> Result<&CellStats, AnalyzerError> {
        self.cells
            .get(key)
            .ok_or_else(|| AnalyzerError::MissingCell(key.label()))
    }
}

/// Groups records by cell and summarizes the derived metrics. Failed or
/// inconsistent records count toward the error rate and the cell's invalid
/// tally but not its statistics.
pub fn build_report(records: &[ExecutionRecord]) -> Result<AggregateReport, AnalyzerError> {
    if records.is_empty() {
        return Err(AnalyzerError::EmptyInput);
    }
    let mut valid: BTreeMap<CellKey, Vec<MetricSet>> = BTreeMap::new();
    let mut invalid: BTreeMap<CellKey, usize> = BTreeMap::new();
    for record in records {
        let key = CellKey::of(record);
        match derive_metrics(record) {
            Ok(metrics) if record.success => valid.entry(key).or_default().push(metrics),
            _ => *invalid.entry(key).or_default() += 1,
        }
    }
    let mut cells = BTreeMap::new();
    for (key, sets) in &valid {
        let field = |f: fn(&MetricSet) -> u64| -> Vec<f64> {
            sets.iter().map(|m| f(m) as f64).collect()
        };
        cells.insert(
            *key,
            CellStats {
                key: *key,
                sample_count: sets.len(),
                invalid_count: invalid.get(key).copied().unwrap_or(0),
                total_ns: summarize(&field(|m| m.total_ns))?,
                cold_start_ns: summarize(&field(|m| m.cold_start_ns))?,
                io_latency_ns: summarize(&field(|m| m.io_latency_ns))?,
                serialization_ns: summarize(&field(|m| m.serialization_ns))?,
                compute_ns: summarize(&field(|m| m.compute_ns))?,
                mean_output_len: mean(&field(|m| m.output_len))?,
            },
        );
    }
    // A cell whose records were all invalid gets no stats entry; its
    // failures still count toward the global error rate.
    let error_rate = lumos_observer::error_rate(records)
        .map_err(|_| AnalyzerError::EmptyInput)?;
    Ok(AggregateReport { cells, error_rate })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Total,
    ColdStart,
    IoLatency,
    Serialization,
    Compute,
}

impl Metric {
    pub fn pick(&self, stats: &CellStats) -> MetricSummary {
        match self {
            Metric::Total => stats.total_ns,
            Metric::ColdStart => stats.cold_start_ns,
            Metric::IoLatency => stats.io_latency_ns,
            Metric::Serialization => stats.serialization_ns,
            Metric::Compute => stats.compute_ns,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub label: String,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

impl RatioRow {
    pub fn new(label: &str, numerator: f64, denominator: f64) -> RatioRow {
        RatioRow {
            label: label.to_string(),
            numerator,
            denominator,
            ratio: numerator / denominator,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub rows: Vec<RatioRow>,
}

impl RatioTable {
    pub fn push(&mut self, label: &str, numerator: f64, denominator: f64) {
        self.rows.push(RatioRow::new(label, numerator, denominator));
    }
}

/// Mean-of-`metric` ratios, numerator mode over denominator mode, one row
/// per (workload, group) present for both modes in the report.
pub fn compare_modes(
    report: &AggregateReport,
    metric: Metric,
    numerator: RuntimeMode,
    denominator: RuntimeMode,
    start_kind: StartKind,
) -> Result<RatioTable, AnalyzerError> {
    let mut table = RatioTable::default();
    for (key, stats) in &report.cells {
        if key.mode != numerator || key.start_kind != start_kind {
            continue;
        }
        let den_key = CellKey {
            mode: denominator,
            ..*key
        };
        let den = report.cell(&den_key)?;
        table.push(
            &format!("{:?}/{:?}", key.workload, key.group),
            metric.pick(stats).mean,
            metric.pick(den).mean,
        );
    }
    if table.rows.is_empty() {
        return Err(AnalyzerError::MissingCell(format!(
            "no {:?} cells for mode {}",
            start_kind,
            numerator.name()
        )));
    }
    Ok(table)
}
