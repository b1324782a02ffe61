//! Pipeline orchestration behind the `lumos` binary: build the artifact
//! matrix, run the benchmark matrix, and render reports.

pub mod bench;
pub mod config;
pub mod manifest;
pub mod report;

pub use bench::{cmd_bench, BenchSummary};
pub use config::{BaasSection, ExperimentConfig, TraceSection};
pub use manifest::{cmd_build, load_manifest, Manifest, ManifestEntry};
pub use report::cmd_report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration; maps to exit code 2.
    #[error("config error: {0}")]
    Config(String),
    /// Some cells failed but the run produced output; exit code 1.
    #[error("partial failure: {0}")]
    Partial(String),
    #[error("{0}")]
    Fatal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

fn fatal(e: impl std::fmt::Display) -> CliError {
    CliError::Fatal(e.to_string())
}
