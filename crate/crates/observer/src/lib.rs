//! Execution records and the per-invocation metric set derived from them.
//!
//! Records carry raw lifecycle timestamps from one monotonic clock per
//! harness process plus the instance-reported phase durations; everything
//! reported downstream is derived here.

use lumos_core::{PayloadGroup, PhaseTimings, RuntimeMode, StartKind, WireErrorCode, WorkloadId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ObserverError {
    #[error("inconsistent timestamps: {0}")]
    InconsistentTimestamps(String),
    #[error("no records")]
    EmptyInput,
}

/// One invocation, fully timestamped. Spawn/ready are present exactly for
/// cold starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionRecord {
    pub experiment_id: String,
    pub run_index: u32,
    pub workload: WorkloadId,
    pub group: PayloadGroup,
    pub mode: RuntimeMode,
    pub start_kind: StartKind,
    pub instance_id: String,
    pub pid: u32,
    pub t_submit_ns: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_spawn_ns: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_ready_ns: Option<u64>,
    pub t_request_sent_ns: u64,
    pub t_response_recv_ns: u64,
    pub phases: PhaseTimings,
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<WireErrorCode>,
    pub output_len: u64,
    pub output_digest: String,
}

/// The derived per-invocation metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSet {
    /// Client-side total: submission to response receipt.
    pub total_ns: u64,
    /// Spawn to readiness; zero for warm starts.
    pub cold_start_ns: u64,
    /// Storage fetch + store.
    pub io_latency_ns: u64,
    /// Payload decode + output encode.
    pub serialization_ns: u64,
    pub compute_ns: u64,
    pub output_len: u64,
}

impl ExecutionRecord {
    /// Checks the lifecycle ordering invariants.
    pub fn validate(&self) -> Result<(), ObserverError> {
        let fail = |msg: String| Err(ObserverError::InconsistentTimestamps(msg));
        match (self.start_kind, self.t_spawn_ns, self.t_ready_ns) {
            (StartKind::Cold, Some(spawn), Some(ready)) => {
                if !(self.t_submit_ns <= spawn
                    && spawn <= ready
                    && ready <= self.t_request_sent_ns)
                {
                    return fail(format!(
                        "cold ordering violated: submit {} spawn {} ready {} sent {}",
                        self.t_submit_ns, spawn, ready, self.t_request_sent_ns
                    ));
                }
            }
            (StartKind::Cold, _, _) => {
                return fail("cold record without spawn/ready timestamps".into())
            }
            (StartKind::Warm, None, None) => {
                if self.t_submit_ns > self.t_request_sent_ns {
                    return fail(format!(
                        "warm ordering violated: submit {} sent {}",
                        self.t_submit_ns, self.t_request_sent_ns
                    ));
                }
            }
            (StartKind::Warm, _, _) => {
                return fail("warm record with spawn/ready timestamps".into())
            }
        }
        if self.t_request_sent_ns > self.t_response_recv_ns {
            return fail(format!(
                "sent {} after recv {}",
                self.t_request_sent_ns, self.t_response_recv_ns
            ));
        }
        Ok(())
    }
}

/// Derives the metric set; fails on records violating timestamp ordering,
/// which callers count toward the error rate and drop from aggregates.
pub fn derive_metrics(record: &ExecutionRecord) -> Result<MetricSet, ObserverError> {
    record.validate()?;
    let cold_start_ns = match (record.t_spawn_ns, record.t_ready_ns) {
        (Some(spawn), Some(ready)) => ready - spawn,
        _ => 0,
    };
    Ok(MetricSet {
        total_ns: record.t_response_recv_ns - record.t_submit_ns,
        cold_start_ns,
        io_latency_ns: record.phases.io_fetch_ns + record.phases.io_store_ns,
        serialization_ns: record.phases.deserialize_ns + record.phases.serialize_ns,
        compute_ns: record.phases.compute_ns,
        output_len: record.output_len,
    })
}

impl MetricSet {
    /// Cold start plus the instance-reported phase durations; never more
    /// than the client total plus scheduling slack.
    pub fn accounted_ns(&self) -> u64 {
        self.cold_start_ns + self.io_latency_ns + self.serialization_ns + self.compute_ns
    }
}

/// Fraction of records that failed or carry inconsistent timestamps.
pub fn error_rate(records: &[ExecutionRecord]) -> Result<f64, ObserverError> {
    if records.is_empty() {
        return Err(ObserverError::EmptyInput);
    }
    let failures = records
        .iter()
        .filter(|r| !r.success || r.validate().is_err())
        .count();
    Ok(failures as f64 / records.len() as f64)
}
