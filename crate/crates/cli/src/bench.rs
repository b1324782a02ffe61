//! The measurement loop: executes the configured matrix cell by cell,
//! writing line-atomic JSONL so an interrupted run stays parseable.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Condvar, Mutex};

use lumos_adapters::{spawn_instance, ArtifactInfo, InstanceHandle, DEFAULT_READY_TIMEOUT};
use lumos_analyzer::ExperimentMeta;
use lumos_baas::BaasClient;
use lumos_core::{
    Clock, PayloadGroup, RuntimeMode, StartKind, StorageRef, WorkloadId, WorkloadRequest,
};
use lumos_observer::ExecutionRecord;
use lumos_telemetry::{aggregate, start_sampling, ResourceUsage, DEFAULT_SAMPLE_INTERVAL};
use lumos_tracegen::{generate_trace, replay};
use lumos_workloads::{generate_payload, GeneratedPayload};
use serde::{Deserialize, Serialize};

use crate::manifest::Manifest;
use crate::{cmd_build, fatal, load_manifest, BaasSection, CliError, ExperimentConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub workload: WorkloadId,
    pub mode: RuntimeMode,
    pub group: PayloadGroup,
    pub usage: ResourceUsage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputRow {
    pub mode: RuntimeMode,
    pub entry_index: usize,
    pub latency_ns: u64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputSummary {
    pub mode: RuntimeMode,
    pub requests: usize,
    pub makespan_ns: u64,
    pub throughput_rps: f64,
    pub max_in_flight: u64,
}

#[derive(Debug, Clone)]
pub struct BenchSummary {
    pub cells: usize,
    pub records: usize,
    pub failures: usize,
    pub results_dir: PathBuf,
}

/// JSONL writer that flushes after every line, so a crash mid-run loses at
/// most the line being written.
struct RecordWriter {
    file: BufWriter<File>,
}

impl RecordWriter {
    fn create(path: &Path, meta: &ExperimentMeta) -> Result<RecordWriter, CliError> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut writer = RecordWriter {
            file: BufWriter::new(File::create(path)?),
        };
        writer.push(meta)?;
        Ok(writer)
    }

    fn push<T: Serialize>(&mut self, row: &T) -> Result<(), CliError> {
        writeln!(self.file, "{}", serde_json::to_string(row).map_err(fatal)?)?;
        self.file.flush()?;
        Ok(())
    }
}

fn payload_key(workload: WorkloadId, group: PayloadGroup) -> String {
    format!("payload/{}/{}", workload.name(), group.index())
}

/// Builds the request for one cell. Data-intensive workloads route their
/// payload through storage when a BaaS endpoint is configured; everything
/// else ships inline. Integer-sized workloads use the group's N, which the
/// instance derives from the group itself.
fn build_request(
    workload: WorkloadId,
    group: PayloadGroup,
    seed: u64,
    baas: Option<&BaasSection>,
) -> WorkloadRequest {
    let mut request = WorkloadRequest::new(workload, group);
    if let GeneratedPayload::Bytes(bytes) = generate_payload(workload, group, seed) {
        match baas {
            Some(section) if workload.is_high_io() => {
                request.storage = Some(StorageRef {
                    host: section.host.clone(),
                    port: section.port,
                    key: payload_key(workload, group),
                });
            }
            _ => request = request.with_inline_payload(&bytes),
        }
    }
    request
}

/// Applies the configured settings to the running BaaS and stages every
/// payload the matrix will fetch.
fn prepare_baas(config: &ExperimentConfig, section: &BaasSection) -> Result<(), CliError> {
    let mut client = BaasClient::new(&section.host, section.port);
    let settings = section
        .settings
        .validate()
        .map_err(|e| CliError::Config(format!("baas: {e}")))?;
    client.configure(settings).map_err(|e| {
        CliError::Fatal(format!(
            "baas at {}:{} not reachable ({e}); run `lumos serve-baas`",
            section.host, section.port
        ))
    })?;
    for &workload in &config.workloads {
        if !workload.is_high_io() {
            continue;
        }
        for &group in &config.groups {
            if let GeneratedPayload::Bytes(bytes) = generate_payload(workload, group, config.seed)
            {
                client
                    .put(&payload_key(workload, group), &bytes)
                    .map_err(|e| CliError::Fatal(format!("baas put: {e}")))?;
            }
        }
    }
    Ok(())
}

struct CellRunner<'a> {
    config: &'a ExperimentConfig,
    clock: Clock,
    records: usize,
    failures: usize,
}

impl CellRunner<'_> {
    fn record_from(
        &self,
        request: &WorkloadRequest,
        start_kind: StartKind,
        run_index: u32,
        handle: &InstanceHandle,
        t_submit_ns: u64,
        invocation: &lumos_adapters::Invocation,
    ) -> ExecutionRecord {
        lumos_adapters::build_record(
            &self.config.experiment_id,
            run_index,
            start_kind,
            request,
            handle,
            t_submit_ns,
            invocation,
        )
    }

    fn cold_rep(
        &mut self,
        artifact: &ArtifactInfo,
        request: &WorkloadRequest,
        run_index: u32,
        writer: &mut RecordWriter,
    ) -> Result<(), CliError> {
        let mut handle = match spawn_instance(artifact, &self.clock, DEFAULT_READY_TIMEOUT) {
            Ok(handle) => handle,
            Err(e) => {
                eprintln!("cold spawn failed: {e}");
                self.failures += 1;
                return Ok(());
            }
        };
        match handle.invoke(request, &self.clock) {
            Ok(invocation) => {
                let record = self.record_from(
                    request,
                    StartKind::Cold,
                    run_index,
                    &handle,
                    handle.t_submit_ns,
                    &invocation,
                );
                if !record.success {
                    self.failures += 1;
                }
                writer.push(&record)?;
                self.records += 1;
            }
            Err(e) => {
                eprintln!("cold invoke failed: {e}");
                self.failures += 1;
            }
        }
        let _ = handle.shutdown();
        Ok(())
    }

    fn warm_rep(
        &mut self,
        handle: &mut InstanceHandle,
        request: &WorkloadRequest,
        run_index: u32,
        writer: &mut RecordWriter,
    ) -> Result<(), CliError> {
        let t_submit_ns = self.clock.now_ns();
        match handle.invoke(request, &self.clock) {
            Ok(invocation) => {
                let record =
                    self.record_from(request, StartKind::Warm, run_index, handle, t_submit_ns, &invocation);
                if !record.success {
                    self.failures += 1;
                }
                writer.push(&record)?;
                self.records += 1;
            }
            Err(e) => {
                eprintln!("warm invoke failed: {e}");
                self.failures += 1;
            }
        }
        Ok(())
    }

    /// Runs one (workload, mode, group) cell. Cold and warm repetitions are
    /// interleaved so slow drift in machine load hits both means equally.
    fn run_cell(
        &mut self,
        artifact: &ArtifactInfo,
        request: &WorkloadRequest,
        writer: &mut RecordWriter,
        resources: &mut RecordWriter,
    ) -> Result<(), CliError> {
        let do_cold = self.config.start_kinds.contains(&StartKind::Cold);
        let do_warm = self.config.start_kinds.contains(&StartKind::Warm);
        let mut warm_handle = if do_warm {
            match spawn_instance(artifact, &self.clock, DEFAULT_READY_TIMEOUT) {
                // One unrecorded invocation warms caches and lazy
                // initialization before the measured repetitions.
                Ok(mut handle) => match handle.invoke(request, &self.clock) {
                    Ok(_) => Some(handle),
                    Err(e) => {
                        eprintln!("warmup invoke failed: {e}");
                        self.failures += self.config.repetitions as usize;
                        let _ = handle.shutdown();
                        None
                    }
                },
                Err(e) => {
                    eprintln!("warm spawn failed: {e}");
                    self.failures += self.config.repetitions as usize;
                    None
                }
            }
        } else {
            None
        };
        let mut sampler = warm_handle.as_ref().and_then(|handle| {
            start_sampling(
                handle.pid,
                &handle.instance_id,
                DEFAULT_SAMPLE_INTERVAL,
                self.clock,
            )
            .ok()
        });

        let mut run_index = 0u32;
        for _ in 0..self.config.repetitions {
            if do_cold {
                self.cold_rep(artifact, request, run_index, writer)?;
                run_index += 1;
            }
            if let Some(handle) = warm_handle.as_mut() {
                self.warm_rep(handle, request, run_index, writer)?;
                run_index += 1;
            }
        }

        if let Some(sampler) = sampler.as_mut() {
            // The window spans warmup through shutdown: the repetitions
            // themselves can be shorter than one sampling interval.
            let samples = sampler.stop();
            if let Ok(usage) = aggregate(&samples, 0, u64::MAX) {
                resources.push(&ResourceRow {
                    workload: request.workload,
                    mode: artifact.mode,
                    group: request.group,
                    usage,
                })?;
            }
        }
        if let Some(handle) = warm_handle {
            let _ = handle.shutdown();
        }
        Ok(())
    }
}

fn run_trace_phase(
    config: &ExperimentConfig,
    manifest: &Manifest,
    clock: &Clock,
    results_dir: &Path,
    meta: &ExperimentMeta,
) -> Result<usize, CliError> {
    let Some(section) = &config.trace else {
        return Ok(0);
    };
    let request = build_request(
        section.workload,
        section.group,
        config.seed,
        config.baas.as_ref(),
    );
    let trace = generate_trace(&section.pattern, &request, config.seed).map_err(fatal)?;
    let pool_size = section
        .pool_size
        .or_else(|| section.pattern.concurrency_bound())
        .unwrap_or(4)
        .clamp(1, 16) as usize;
    let mut failures = 0usize;
    let mut summaries = Vec::new();
    for &mode in &config.modes {
        let artifact = manifest.entry(section.workload, mode)?.to_artifact();
        let mut pool = Vec::new();
        for _ in 0..pool_size {
            let mut handle = spawn_instance(&artifact, clock, DEFAULT_READY_TIMEOUT)
                .map_err(|e| CliError::Fatal(format!("trace pool spawn: {e}")))?;
            handle
                .invoke(&request, clock)
                .map_err(|e| CliError::Fatal(format!("trace pool warmup: {e}")))?;
            pool.push(handle);
        }
        let pool = Mutex::new(pool);
        let available = Condvar::new();
        let result = replay(&trace, |_, entry| {
            let mut instance = {
                let mut guard = pool.lock().unwrap();
                while guard.is_empty() {
                    guard = available.wait(guard).unwrap();
                }
                guard.pop().unwrap()
            };
            let t_submit_ns = clock.now_ns();
            let outcome = instance.invoke(&entry.request, clock);
            pool.lock().unwrap().push(instance);
            available.notify_one();
            match outcome {
                Ok(invocation) if invocation.response.is_ok() => {
                    (true, invocation.t_response_recv_ns - t_submit_ns)
                }
                Ok(invocation) => (false, invocation.t_response_recv_ns - t_submit_ns),
                Err(_) => (false, 0),
            }
        });
        let mut writer = RecordWriter::create(
            &results_dir.join(format!("throughput_{}.jsonl", mode.name())),
            meta,
        )?;
        for (entry_index, &(success, latency_ns)) in result.outcomes.iter().enumerate() {
            if !success {
                failures += 1;
            }
            writer.push(&ThroughputRow {
                mode,
                entry_index,
                latency_ns,
                success,
            })?;
        }
        summaries.push(ThroughputSummary {
            mode,
            requests: result.outcomes.len(),
            makespan_ns: result.makespan_ns,
            throughput_rps: result.throughput_rps(),
            max_in_flight: result.max_in_flight,
        });
        for handle in pool.into_inner().unwrap() {
            let _ = handle.shutdown();
        }
    }
    std::fs::write(
        results_dir.join("throughput_summary.json"),
        serde_json::to_string_pretty(&summaries).map_err(fatal)?,
    )?;
    Ok(failures)
}

pub fn cmd_bench(
    config: &ExperimentConfig,
    force: bool,
    dry_run: bool,
) -> Result<BenchSummary, CliError> {
    let matrix = config.matrix();
    // The expansion is logged up front so a plan is inspectable even when
    // the run is interrupted.
    for &(workload, mode, group, start_kind) in &matrix {
        println!(
            "plan: {} [{}] group {} {} x{}",
            workload,
            mode.name(),
            group.index(),
            start_kind,
            config.repetitions
        );
    }
    if let Some(section) = &config.trace {
        println!(
            "plan: trace {} group {} across {} modes",
            section.workload,
            section.group.index(),
            config.modes.len()
        );
    }
    let results_dir = config.results_dir();
    if dry_run {
        return Ok(BenchSummary {
            cells: matrix.len(),
            records: 0,
            failures: 0,
            results_dir,
        });
    }

    // Reuse the manifest only when it covers this config's whole matrix.
    let covered = |manifest: &Manifest| {
        config.workloads.iter().all(|&w| {
            config
                .modes
                .iter()
                .all(|&m| manifest.entry(w, m).is_ok())
        })
    };
    let manifest = match load_manifest(&config.artifacts_dir()) {
        Ok(manifest) if !force && covered(&manifest) => manifest,
        _ => cmd_build(config, force, false)?,
    };
    if let Some(section) = &config.baas {
        prepare_baas(config, section)?;
    }

    std::fs::create_dir_all(&results_dir)?;
    let config_json = serde_json::to_string(config).map_err(fatal)?;
    let meta = ExperimentMeta::new(&config.experiment_id, &config_json, config.repetitions);
    let mut runner = CellRunner {
        config,
        clock: Clock::new(),
        records: 0,
        failures: 0,
    };
    let mut resources = RecordWriter::create(&results_dir.join("resources.jsonl"), &meta)?;

    for &workload in &config.workloads {
        for &mode in &config.modes {
            let artifact = manifest.entry(workload, mode)?.to_artifact();
            let mut writer = RecordWriter::create(
                &results_dir.join(format!("records_{}_{}.jsonl", workload.name(), mode.name())),
                &meta,
            )?;
            for &group in &config.groups {
                let request = build_request(workload, group, config.seed, config.baas.as_ref());
                runner.run_cell(&artifact, &request, &mut writer, &mut resources)?;
            }
        }
    }

    let clock = runner.clock;
    let trace_failures = run_trace_phase(config, &manifest, &clock, &results_dir, &meta)?;
    let summary = BenchSummary {
        cells: matrix.len(),
        records: runner.records,
        failures: runner.failures + trace_failures,
        results_dir,
    };
    println!(
        "bench complete: {} cells, {} records, {} failures -> {}",
        summary.cells,
        summary.records,
        summary.failures,
        summary.results_dir.display()
    );
    Ok(summary)
}
