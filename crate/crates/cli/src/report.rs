//! Report generation: turns a results directory into the five figure data
//! files plus a findings summary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lumos_analyzer::{
    build_report, ecdf, ecdf_points, emit_csv, load_records, AggregateReport, CellKey, PlotPoint,
};
use lumos_core::{RuntimeMode, StartKind, WorkloadId};
use lumos_observer::{derive_metrics, ExecutionRecord};

use crate::bench::{ResourceRow, ThroughputRow, ThroughputSummary};
use crate::manifest::Manifest;
use crate::{fatal, load_manifest, CliError, ExperimentConfig};

fn missing(what: &str, dir: &Path) -> CliError {
    CliError::Fatal(format!(
        "missing results: no {what} under {}; run `lumos bench` first",
        dir.display()
    ))
}

fn load_all_records(results_dir: &Path) -> Result<Vec<ExecutionRecord>, CliError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(results_dir)
        .map_err(|_| missing("results directory", results_dir))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("records_") && n.ends_with(".jsonl"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(missing("record files", results_dir));
    }
    let mut records = Vec::new();
    for path in paths {
        let (_, mut file_records): (_, Vec<ExecutionRecord>) =
            load_records(&path).map_err(|e| CliError::Fatal(format!("{}: {e}", path.display())))?;
        records.append(&mut file_records);
    }
    if records.is_empty() {
        return Err(missing("records", results_dir));
    }
    Ok(records)
}

fn fig5_image_sizes(manifest: &Manifest, out: &Path) -> Result<(), CliError> {
    let mut workloads: Vec<WorkloadId> = manifest.entries.iter().map(|e| e.workload).collect();
    workloads.sort();
    workloads.dedup();
    let points: Vec<PlotPoint> = manifest
        .entries
        .iter()
        .map(|entry| {
            let x = workloads.iter().position(|w| *w == entry.workload).unwrap();
            PlotPoint::new(entry.mode.name(), x as f64, entry.artifact_bytes as f64)
        })
        .collect();
    emit_csv(&points, &out.join("fig5_image_sizes.csv")).map_err(fatal)
}

fn fig6_latency(report: &AggregateReport, out: &Path) -> Result<(), CliError> {
    let points: Vec<PlotPoint> = report
        .cells
        .values()
        .map(|stats| {
            let key = stats.key;
            PlotPoint::new(
                &format!("{}/{}/{}", key.workload, key.mode.name(), key.start_kind),
                key.group.index() as f64,
                stats.total_ns.mean / 1e6,
            )
        })
        .collect();
    emit_csv(&points, &out.join("fig6_latency.csv")).map_err(fatal)
}

fn fig7_io_serialization(records: &[ExecutionRecord], out: &Path) -> Result<(), CliError> {
    let mut by_series: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for record in records {
        let Ok(metrics) = derive_metrics(record) else {
            continue;
        };
        if !record.success || record.start_kind != StartKind::Warm {
            continue;
        }
        by_series
            .entry(format!("{}/io", record.mode.name()))
            .or_default()
            .push(metrics.io_latency_ns as f64 / 1e6);
        by_series
            .entry(format!("{}/serialization", record.mode.name()))
            .or_default()
            .push(metrics.serialization_ns as f64 / 1e6);
    }
    let mut points = Vec::new();
    for (series, values) in &by_series {
        points.extend(ecdf_points(series, &ecdf(values).map_err(fatal)?));
    }
    emit_csv(&points, &out.join("fig7_io_serialization_cdf.csv")).map_err(fatal)
}

fn fig8_resources(results_dir: &Path, out: &Path) -> Result<Vec<ResourceRow>, CliError> {
    let rows: Vec<ResourceRow> = match load_records(&results_dir.join("resources.jsonl")) {
        Ok((_, rows)) => rows,
        Err(_) => Vec::new(),
    };
    // Two panels, each normalized by its own global max so exactly one
    // series touches 1.0 per panel.
    let mut points = Vec::new();
    for (panel, value) in [
        ("cpu", (|r: &ResourceRow| r.usage.cpu_time_delta_ns as f64) as fn(&ResourceRow) -> f64),
        ("mem", |r: &ResourceRow| r.usage.peak_rss_bytes as f64),
    ] {
        let mut by_series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for row in &rows {
            by_series
                .entry(format!("{}/{}/{}", panel, row.workload, row.mode.name()))
                .or_default()
                .push((row.group.index() as f64, value(row)));
        }
        let max = by_series
            .values()
            .flatten()
            .map(|&(_, v)| v)
            .fold(0.0f64, f64::max);
        if max <= 0.0 {
            continue;
        }
        for (series, values) in &by_series {
            for &(x, v) in values {
                points.push(PlotPoint::new(series, x, v / max));
            }
        }
    }
    emit_csv(&points, &out.join("fig8_resources.csv")).map_err(fatal)?;
    Ok(rows)
}

fn fig9_throughput(results_dir: &Path, out: &Path) -> Result<Vec<ThroughputRow>, CliError> {
    let mut all_rows = Vec::new();
    let mut points = Vec::new();
    for mode in RuntimeMode::ALL {
        let path = results_dir.join(format!("throughput_{}.jsonl", mode.name()));
        let Ok((_, rows)) = load_records::<ThroughputRow>(&path) else {
            continue;
        };
        let latencies: Vec<f64> = rows
            .iter()
            .filter(|r| r.success)
            .map(|r| r.latency_ns as f64 / 1e6)
            .collect();
        if !latencies.is_empty() {
            points.extend(ecdf_points(mode.name(), &ecdf(&latencies).map_err(fatal)?));
        }
        all_rows.extend(rows);
    }
    emit_csv(&points, &out.join("fig9_throughput_cdf.csv")).map_err(fatal)?;
    Ok(all_rows)
}

/// Largest mean-of-`pick` ratio between two modes across matching cells.
fn max_cell_ratio(
    report: &AggregateReport,
    start_kind: StartKind,
    numerator: RuntimeMode,
    denominator: RuntimeMode,
    pick: fn(&lumos_analyzer::CellStats) -> f64,
) -> Option<(f64, CellKey)> {
    let mut best: Option<(f64, CellKey)> = None;
    for (key, stats) in &report.cells {
        if key.mode != numerator || key.start_kind != start_kind {
            continue;
        }
        let den_key = CellKey {
            mode: denominator,
            ..*key
        };
        let Some(den) = report.cells.get(&den_key) else {
            continue;
        };
        let (num_v, den_v) = (pick(stats), pick(den));
        if den_v <= 0.0 {
            continue;
        }
        let ratio = num_v / den_v;
        if best.is_none_or(|(b, _)| ratio > b) {
            best = Some((ratio, *key));
        }
    }
    best
}

fn ratio_line(label: &str, ratio: Option<(f64, CellKey)>) -> String {
    match ratio {
        Some((ratio, key)) => format!(
            "- {label}: {ratio:.1}x ({} group {}, {} over {})\n",
            key.workload,
            key.group.index(),
            RuntimeMode::BytecodeInterpreted.name(),
            RuntimeMode::NativeProcess.name()
        ),
        None => format!("- {label}: not measured in this run\n"),
    }
}

fn findings(
    manifest: &Manifest,
    report: &AggregateReport,
    resources: &[ResourceRow],
    results_dir: &Path,
) -> String {
    use RuntimeMode::{BytecodeInterpreted as Interp, NativeProcess as Native};
    let mut out = String::from("# Findings\n\nMeasured on this host; ratios are maxima across the matrix.\n\n");

    // 1: deployable size, native image over bytecode module.
    let mut size_ratio: Option<(f64, WorkloadId)> = None;
    for entry in &manifest.entries {
        if entry.mode != Native {
            continue;
        }
        if let Ok(module) = manifest.entry(entry.workload, Interp) {
            let ratio = entry.artifact_bytes as f64 / module.artifact_bytes as f64;
            if size_ratio.is_none_or(|(b, _)| ratio > b) {
                size_ratio = Some((ratio, entry.workload));
            }
        }
    }
    out.push_str(&match size_ratio {
        Some((r, w)) => format!("- image size: native image {r:.1}x the bytecode module ({w})\n"),
        None => "- image size: not measured in this run\n".to_string(),
    });

    // 2: warm latency, interpreted over native.
    out.push_str(&ratio_line(
        "warm latency",
        max_cell_ratio(report, StartKind::Warm, Interp, Native, |s| s.total_ns.mean),
    ));
    // 3: cold latency, interpreted over native.
    out.push_str(&ratio_line(
        "cold latency",
        max_cell_ratio(report, StartKind::Cold, Interp, Native, |s| s.total_ns.mean),
    ));
    // 4: I/O plus serialization overhead, interpreted over native (warm).
    out.push_str(&ratio_line(
        "io+serialization overhead",
        max_cell_ratio(report, StartKind::Warm, Interp, Native, |s| {
            s.io_latency_ns.mean + s.serialization_ns.mean
        }),
    ));

    // 5: resource usage from the warm-phase samplers.
    let resource_ratio = |value: fn(&ResourceRow) -> f64| -> Option<f64> {
        let mut best = None;
        for row in resources.iter().filter(|r| r.mode == Interp) {
            let base = resources.iter().find(|r| {
                r.mode == Native && r.workload == row.workload && r.group == row.group
            })?;
            if value(base) > 0.0 {
                let ratio = value(row) / value(base);
                if best.is_none_or(|b: f64| ratio > b) {
                    best = Some(ratio);
                }
            }
        }
        best
    };
    let cpu = resource_ratio(|r| r.usage.cpu_time_delta_ns as f64);
    let mem = resource_ratio(|r| r.usage.peak_rss_bytes as f64);
    out.push_str(&match (cpu, mem) {
        (Some(cpu), Some(mem)) => format!(
            "- resource usage: interpreted uses {cpu:.1}x the cpu and {mem:.1}x the peak memory of native\n"
        ),
        _ => "- resource usage: not measured in this run\n".to_string(),
    });

    // 6: behavior under load, from the trace replay phase.
    let summaries: Vec<ThroughputSummary> = std::fs::read_to_string(
        results_dir.join("throughput_summary.json"),
    )
    .ok()
    .and_then(|text| serde_json::from_str(&text).ok())
    .unwrap_or_default();
    let rps = |mode: RuntimeMode| {
        summaries
            .iter()
            .find(|s| s.mode == mode)
            .map(|s| s.throughput_rps)
    };
    out.push_str(&match (rps(Native), rps(Interp)) {
        (Some(native), Some(interp)) if interp > 0.0 => format!(
            "- under load: native sustains {:.1}x the throughput of interpreted ({native:.1} vs {interp:.1} rps)\n",
            native / interp
        ),
        _ => "- under load: not measured in this run\n".to_string(),
    });
    out
}

/// Emits the figure data files and findings.md into the results directory.
pub fn cmd_report(config: &ExperimentConfig) -> Result<PathBuf, CliError> {
    let results_dir = config.results_dir();
    let records = load_all_records(&results_dir)?;
    let report = build_report(&records).map_err(fatal)?;
    let manifest = load_manifest(&config.artifacts_dir())?;

    fig5_image_sizes(&manifest, &results_dir)?;
    fig6_latency(&report, &results_dir)?;
    fig7_io_serialization(&records, &results_dir)?;
    let resources = fig8_resources(&results_dir, &results_dir)?;
    fig9_throughput(&results_dir, &results_dir)?;
    std::fs::write(
        results_dir.join("findings.md"),
        findings(&manifest, &report, &resources, &results_dir),
    )?;
    println!("report written to {}", results_dir.display());
    Ok(results_dir)
}
