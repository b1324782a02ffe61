//! Experiment persistence, aggregation statistics, and report generation.

pub mod aggregate;
pub mod report;
pub mod stats;
pub mod store;

pub use aggregate::{
    build_report, compare_modes, AggregateReport, CellKey, CellStats, Metric, MetricSummary,
    RatioRow, RatioTable,
};
pub use report::{ecdf_points, emit_csv, emit_markdown_table, read_csv, PlotPoint};
pub use stats::{ecdf, mean, median, normalize, percentile};
pub use store::{load_records, persist_records, ExperimentMeta, HostInfo, SCHEMA_VERSION};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyzerError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("schema version {found}, expected {expected}")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("empty input")]
    EmptyInput,
    #[error("all values zero, nothing to normalize")]
    AllZero,
    #[error("missing aggregate cell: {0}")]
    MissingCell(String),
}
