//! The experiment configuration file: one JSON document that drives the
//! whole pipeline. Every list participates in the run-matrix cross product.

use std::path::{Path, PathBuf};

use lumos_adapters::DEFAULT_BASE_LAYER_BYTES;
use lumos_baas::BaasSettings;
use lumos_core::{PayloadGroup, RuntimeMode, StartKind, WorkloadId};
use lumos_tracegen::TracePattern;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_experiment_id")]
    pub experiment_id: String,
    #[serde(default = "default_workloads")]
    pub workloads: Vec<WorkloadId>,
    /// Payload size groups, written as 1 / 2 / 3.
    #[serde(default = "default_groups")]
    pub groups: Vec<PayloadGroup>,
    #[serde(default = "default_modes")]
    pub modes: Vec<RuntimeMode>,
    #[serde(default = "default_start_kinds")]
    pub start_kinds: Vec<StartKind>,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    /// Optional load phase replayed after the latency matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceSection>,
    /// Storage service used by the data-intensive workloads when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baas: Option<BaasSection>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Size stand-in for the OS/userland layers of a native process image;
    /// reported alongside every size figure, never silently applied.
    #[serde(default = "default_base_layer_bytes")]
    pub base_layer_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSection {
    pub pattern: TracePattern,
    #[serde(default = "default_trace_workload")]
    pub workload: WorkloadId,
    #[serde(default = "default_trace_group")]
    pub group: PayloadGroup,
    /// Instances serving the replay; defaults to the pattern's concurrency
    /// bound, or 4 for open-loop patterns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaasSection {
    #[serde(default = "default_baas_host")]
    pub host: String,
    pub port: u16,
    #[serde(flatten)]
    pub settings: BaasSettings,
}

fn default_experiment_id() -> String {
    "exp".to_string()
}

fn default_workloads() -> Vec<WorkloadId> {
    WorkloadId::ALL.to_vec()
}

fn default_groups() -> Vec<PayloadGroup> {
    PayloadGroup::ALL.to_vec()
}

fn default_modes() -> Vec<RuntimeMode> {
    RuntimeMode::ALL.to_vec()
}

fn default_start_kinds() -> Vec<StartKind> {
    vec![StartKind::Cold, StartKind::Warm]
}

fn default_repetitions() -> u32 {
    10
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_seed() -> u64 {
    42
}

fn default_base_layer_bytes() -> u64 {
    DEFAULT_BASE_LAYER_BYTES
}

fn default_trace_workload() -> WorkloadId {
    WorkloadId::Fibonacci
}

fn default_trace_group() -> PayloadGroup {
    PayloadGroup::G1
}

fn default_baas_host() -> String {
    "127.0.0.1".to_string()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("read {}: {e}", path.display())))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("parse {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let config_err = |msg: &str| Err(CliError::Config(msg.to_string()));
        if self.repetitions < 1 {
            return config_err("repetitions must be >= 1");
        }
        if self.workloads.is_empty()
            || self.groups.is_empty()
            || self.modes.is_empty()
            || self.start_kinds.is_empty()
        {
            return config_err("workloads, groups, modes, and start_kinds must be non-empty");
        }
        if self.experiment_id.is_empty()
            || self
                .experiment_id
                .chars()
                .any(|c| !c.is_ascii_alphanumeric() && c != '-' && c != '_')
        {
            return config_err("experiment_id must be non-empty [A-Za-z0-9_-]");
        }
        if let Some(trace) = &self.trace {
            trace
                .pattern
                .validate()
                .map_err(|e| CliError::Config(format!("trace: {e}")))?;
        }
        if let Some(baas) = &self.baas {
            baas.settings
                .validate()
                .map_err(|e| CliError::Config(format!("baas: {e}")))?;
        }
        Ok(())
    }

    /// The full latency run matrix, in deterministic order.
    pub fn matrix(&self) -> Vec<(WorkloadId, RuntimeMode, PayloadGroup, StartKind)> {
        let mut cells = Vec::new();
        for &workload in &self.workloads {
            for &mode in &self.modes {
                for &group in &self.groups {
                    for &start_kind in &self.start_kinds {
                        cells.push((workload, mode, group, start_kind));
                    }
                }
            }
        }
        cells
    }

    pub fn artifacts_dir(&self) -> PathBuf {
        self.output_dir.join("artifacts")
    }

    pub fn results_dir(&self) -> PathBuf {
        self.output_dir.join(&self.experiment_id)
    }
}
