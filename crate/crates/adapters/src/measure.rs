//! One-shot client-side start measurements: a cold start spans spawn through
//! response, a warm start reuses an already-serving instance and times only
//! the measured invocation.

use lumos_core::{Clock, StartKind, WorkloadRequest};
use lumos_observer::ExecutionRecord;

use crate::instance::{spawn_instance, InstanceHandle, Invocation, DEFAULT_READY_TIMEOUT};
use crate::{AdapterError, ArtifactInfo};

/// Assembles the execution record for one invocation on `handle`. Spawn and
/// ready timestamps are recorded only for cold starts.
pub fn build_record(
    experiment_id: &str,
    run_index: u32,
    start_kind: StartKind,
    request: &WorkloadRequest,
    handle: &InstanceHandle,
    t_submit_ns: u64,
    invocation: &Invocation,
) -> ExecutionRecord {
    let response = &invocation.response;
    ExecutionRecord {
        experiment_id: experiment_id.to_string(),
        run_index,
        workload: request.workload,
        group: request.group,
        mode: handle.mode,
        start_kind,
        instance_id: handle.instance_id.clone(),
        pid: handle.pid,
        t_submit_ns,
        t_spawn_ns: (start_kind == StartKind::Cold).then_some(handle.t_spawn_ns),
        t_ready_ns: (start_kind == StartKind::Cold).then_some(handle.t_ready_ns),
        t_request_sent_ns: invocation.t_request_sent_ns,
        t_response_recv_ns: invocation.t_response_recv_ns,
        phases: response.phases,
        success: response.is_ok(),
        error: response.error.as_ref().map(|e| e.code),
        output_len: response.output_len,
        output_digest: response.output_digest.clone(),
    }
}

/// Spawns a fresh instance, performs a single invocation, and shuts the
/// instance down. The record's total covers spawn, readiness, and the
/// invocation itself.
pub fn measure_cold(
    artifact: &ArtifactInfo,
    request: &WorkloadRequest,
    clock: &Clock,
) -> Result<ExecutionRecord, AdapterError> {
    let mut handle = spawn_instance(artifact, clock, DEFAULT_READY_TIMEOUT)?;
    let invocation = handle.invoke(request, clock)?;
    let record = build_record(
        "adhoc",
        0,
        StartKind::Cold,
        request,
        &handle,
        handle.t_submit_ns,
        &invocation,
    );
    let _ = handle.shutdown();
    Ok(record)
}

/// Spawns an instance, discards `warmup_count` invocations, then measures the
/// next one. The record's total covers only the measured invocation.
pub fn measure_warm(
    artifact: &ArtifactInfo,
    request: &WorkloadRequest,
    warmup_count: u32,
    clock: &Clock,
) -> Result<ExecutionRecord, AdapterError> {
    let mut handle = spawn_instance(artifact, clock, DEFAULT_READY_TIMEOUT)?;
    for _ in 0..warmup_count {
        handle.invoke(request, clock)?;
    }
    let t_submit_ns = clock.now_ns();
    let invocation = handle.invoke(request, clock)?;
    let record = build_record(
        "adhoc",
        0,
        StartKind::Warm,
        request,
        &handle,
        t_submit_ns,
        &invocation,
    );
    let _ = handle.shutdown();
    Ok(record)
}
