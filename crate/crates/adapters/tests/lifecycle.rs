//! Artifact builds and instance lifecycle across the three runtime modes.
//!
//! These tests launch the workload binaries built alongside this crate, so
//! run them via the workspace (which builds every member's binaries first).

use std::time::Duration;

use lumos_adapters::{
    build_artifact, locate_bin, measure_cold, measure_warm, spawn_instance, AdapterError,
    ArtifactInfo, BuildOptions, DEFAULT_READY_TIMEOUT,
};
use lumos_core::{Clock, PayloadGroup, RuntimeMode, WorkloadId, WorkloadRequest};
use lumos_observer::derive_metrics;

fn fib_request() -> WorkloadRequest {
    WorkloadRequest::new(WorkloadId::Fibonacci, PayloadGroup::G1).with_param("n", "10")
}

#[test]
fn artifacts_build_for_all_modes() {
    let dir = tempfile::tempdir().unwrap();
    let options = BuildOptions::new(dir.path());

    let native = build_artifact(RuntimeMode::NativeProcess, WorkloadId::Fibonacci, &options)
        .unwrap();
    assert!(native.artifact_bytes > options.base_layer_bytes);
    assert!(native.module_path.is_none());

    let interp = build_artifact(
        RuntimeMode::BytecodeInterpreted,
        WorkloadId::Fibonacci,
        &options,
    )
    .unwrap();
    let module = interp.module_path.as_ref().unwrap();
    assert!(module.is_file());
    assert!(interp.artifact_bytes > 100);
    // Bytecode artifacts are orders of magnitude smaller than process images.
    assert!(interp.artifact_bytes * 100 < native.artifact_bytes);

    let aot = build_artifact(RuntimeMode::BytecodeAot, WorkloadId::Fibonacci, &options).unwrap();
    assert!(aot.precompiled_path.as_ref().unwrap().is_file());
    assert!(aot.artifact_bytes > interp.artifact_bytes);
}

#[test]
fn repeated_builds_reuse_cached_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let options = BuildOptions::new(dir.path());
    let first = build_artifact(RuntimeMode::BytecodeAot, WorkloadId::PrimeNumbers, &options)
        .unwrap();
    let mtime = std::fs::metadata(first.precompiled_path.as_ref().unwrap())
        .unwrap()
        .modified()
        .unwrap();
    let second = build_artifact(RuntimeMode::BytecodeAot, WorkloadId::PrimeNumbers, &options)
        .unwrap();
    let mtime_after = std::fs::metadata(second.precompiled_path.as_ref().unwrap())
        .unwrap()
        .modified()
        .unwrap();
    assert_eq!(mtime, mtime_after);

    let forced = BuildOptions {
        force: true,
        ..options
    };
    build_artifact(RuntimeMode::BytecodeAot, WorkloadId::PrimeNumbers, &forced).unwrap();
    let mtime_forced = std::fs::metadata(second.precompiled_path.as_ref().unwrap())
        .unwrap()
        .modified()
        .unwrap();
    assert!(mtime_forced >= mtime_after);
}

#[test]
fn spawn_invoke_shutdown_all_modes() {
    let dir = tempfile::tempdir().unwrap();
    let options = BuildOptions::new(dir.path());
    let clock = Clock::new();
    let mut digests = Vec::new();

    for mode in RuntimeMode::ALL {
        let artifact = build_artifact(mode, WorkloadId::Fibonacci, &options).unwrap();
        let mut instance = spawn_instance(&artifact, &clock, DEFAULT_READY_TIMEOUT).unwrap();
        assert!(instance.t_submit_ns <= instance.t_spawn_ns);
        assert!(instance.t_spawn_ns <= instance.t_ready_ns);
        assert!(!instance.instance_id.is_empty());

        // Cold then a few warm invocations on the same instance.
        for _ in 0..3 {
            let invocation = instance.invoke(&fib_request(), &clock).unwrap();
            assert!(invocation.response.is_ok(), "{mode}: {:?}", invocation.response.error);
            assert!(invocation.t_request_sent_ns < invocation.t_response_recv_ns);
            digests.push(invocation.response.output_digest.clone());
        }
        let graceful = instance.shutdown().unwrap();
        assert!(graceful, "{mode} did not exit on stdin close");
    }
    assert!(digests.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn ready_timeout_kills_the_child() {
    let artifact = ArtifactInfo {
        mode: RuntimeMode::NativeProcess,
        workload: WorkloadId::Fibonacci,
        launch_binary: "/bin/cat".into(), // never prints a readiness line
        module_path: None,
        precompiled_path: None,
        artifact_bytes: 0,
        build_ms: 0,
    };
    let clock = Clock::new();
    let err = spawn_instance(&artifact, &clock, Duration::from_millis(200)).unwrap_err();
    assert!(matches!(err, AdapterError::ReadyTimeout(_)), "{err}");
}

#[test]
fn garbage_readiness_line_is_a_protocol_error() {
    let artifact = ArtifactInfo {
        mode: RuntimeMode::NativeProcess,
        workload: WorkloadId::Fibonacci,
        launch_binary: "/bin/echo".into(), // prints an empty line
        module_path: None,
        precompiled_path: None,
        artifact_bytes: 0,
        build_ms: 0,
    };
    let clock = Clock::new();
    let err = spawn_instance(&artifact, &clock, Duration::from_secs(5)).unwrap_err();
    assert!(matches!(err, AdapterError::Protocol(_)), "{err}");
}

#[test]
fn locate_bin_finds_workspace_binaries() {
    assert!(locate_bin("lumos-fn").unwrap().is_file());
    assert!(locate_bin("lumos-engine").unwrap().is_file());
    assert!(matches!(
        locate_bin("lumos-does-not-exist"),
        Err(AdapterError::MissingBinary(_))
    ));
}

#[test]
fn measured_cold_and_warm_records_have_start_kind_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let options = BuildOptions::new(dir.path());
    let clock = Clock::new();
    let artifact =
        build_artifact(RuntimeMode::NativeProcess, WorkloadId::Fibonacci, &options).unwrap();

    let cold = measure_cold(&artifact, &fib_request(), &clock).unwrap();
    assert!(cold.success);
    cold.validate().unwrap();
    assert!(cold.t_spawn_ns.is_some() && cold.t_ready_ns.is_some());
    assert!(derive_metrics(&cold).unwrap().cold_start_ns > 0);

    let warm = measure_warm(&artifact, &fib_request(), 2, &clock).unwrap();
    assert!(warm.success);
    warm.validate().unwrap();
    assert!(warm.t_spawn_ns.is_none() && warm.t_ready_ns.is_none());
    assert_eq!(derive_metrics(&warm).unwrap().cold_start_ns, 0);
}

#[test]
fn cold_totals_dominate_warm_totals_on_a_short_request() {
    let dir = tempfile::tempdir().unwrap();
    let options = BuildOptions::new(dir.path());
    let clock = Clock::new();
    let artifact =
        build_artifact(RuntimeMode::NativeProcess, WorkloadId::Fibonacci, &options).unwrap();

    let mut dominated = 0;
    for _ in 0..10 {
        let cold = measure_cold(&artifact, &fib_request(), &clock).unwrap();
        let warm = measure_warm(&artifact, &fib_request(), 1, &clock).unwrap();
        let cold_total = derive_metrics(&cold).unwrap().total_ns;
        let warm_total = derive_metrics(&warm).unwrap().total_ns;
        if cold_total >= warm_total {
            dominated += 1;
        }
    }
    // Spawn + readiness dwarf a sub-millisecond invoke; allow one outlier.
    assert!(dominated >= 9, "cold >= warm in only {dominated}/10 pairs");
}
