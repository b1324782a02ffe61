use std::collections::BTreeMap;

use lumos_analyzer::{
    build_report, compare_modes, ecdf, ecdf_points, emit_csv, emit_markdown_table, load_records,
    mean, median, normalize, percentile, persist_records, read_csv, AnalyzerError, ExperimentMeta,
    Metric, PlotPoint, RatioRow, SCHEMA_VERSION,
};
use lumos_core::{
    PayloadGroup, PhaseTimings, RuntimeMode, SplitMix64, StartKind, WireErrorCode, WorkloadId,
};
use lumos_observer::ExecutionRecord;

fn warm_record(
    workload: WorkloadId,
    mode: RuntimeMode,
    group: PayloadGroup,
    total_us: u64,
) -> ExecutionRecord {
    ExecutionRecord {
        experiment_id: "t".into(),
        run_index: 0,
        workload,
        group,
        mode,
        start_kind: StartKind::Warm,
        instance_id: "i-1".into(),
        pid: 1,
        t_submit_ns: 0,
        t_spawn_ns: None,
        t_ready_ns: None,
        t_request_sent_ns: 10,
        t_response_recv_ns: total_us * 1_000,
        phases: PhaseTimings {
            io_fetch_ns: 100,
            deserialize_ns: 200,
            compute_ns: total_us * 500,
            serialize_ns: 300,
            io_store_ns: 400,
        },
        success: true,
        error: None,
        output_len: 64,
        output_digest: "abcd".into(),
    }
}

fn random_record(rng: &mut SplitMix64, i: u32) -> ExecutionRecord {
    let workload = WorkloadId::ALL[rng.next_below(8) as usize];
    let mode = RuntimeMode::ALL[rng.next_below(3) as usize];
    let group = PayloadGroup::ALL[rng.next_below(3) as usize];
    let cold = rng.next_below(2) == 0;
    let submit = rng.next_below(1 << 40);
    ExecutionRecord {
        experiment_id: format!("exp-{}", rng.next_below(4)),
        run_index: i,
        workload,
        group,
        mode,
        start_kind: if cold { StartKind::Cold } else { StartKind::Warm },
        instance_id: format!("inst-{}", rng.next_u64()),
        pid: rng.next_below(1 << 22) as u32,
        t_submit_ns: submit,
        t_spawn_ns: cold.then(|| submit + rng.next_below(1_000_000)),
        t_ready_ns: cold.then(|| submit + 1_000_000 + rng.next_below(1_000_000)),
        t_request_sent_ns: submit + 2_000_000,
        t_response_recv_ns: submit + 2_000_000 + rng.next_below(1 << 30),
        phases: PhaseTimings {
            io_fetch_ns: rng.next_below(1 << 20),
            deserialize_ns: rng.next_below(1 << 20),
            compute_ns: rng.next_below(1 << 28),
            serialize_ns: rng.next_below(1 << 20),
            io_store_ns: rng.next_below(1 << 20),
        },
        success: rng.next_below(10) != 0,
        error: (rng.next_below(10) == 0).then_some(WireErrorCode::Internal),
        output_len: rng.next_below(1 << 21),
        output_digest: format!("{:016x}", rng.next_u64()),
    }
}

#[test]
fn ecdf_is_monotone_and_ends_at_one() {
    let points = ecdf(&[3.0, 1.0, 2.0]).unwrap();
    assert_eq!(
        points,
        vec![(1.0, 1.0 / 3.0), (2.0, 2.0 / 3.0), (3.0, 1.0)]
    );
    // Ties occupy consecutive steps and the last step is exactly 1.0.
    let tied = ecdf(&[5.0, 5.0, 5.0, 7.0]).unwrap();
    assert!(tied.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].0 <= w[1].0));
    assert_eq!(tied.last().unwrap(), &(7.0, 1.0));
    assert!(ecdf(&[]).is_err());
}

#[test]
fn ecdf_tracks_the_uniform_cdf() {
    let mut rng = SplitMix64::new(42);
    let values: Vec<f64> = (0..1000).map(|_| rng.next_f64()).collect();
    let points = ecdf(&values).unwrap();
    // Kolmogorov-Smirnov style bound: for n = 1000 a deviation of 0.06
    // has probability well under 1e-3.
    let ks = points
        .iter()
        .map(|&(x, y)| (y - x).abs())
        .fold(0.0f64, f64::max);
    assert!(ks < 0.06, "ks deviation {ks}");
}

#[test]
fn normalize_maps_the_panel_max_to_exactly_one() {
    let mut group = BTreeMap::new();
    group.insert("a".to_string(), vec![1.0, 4.0]);
    group.insert("b".to_string(), vec![2.0, 8.0]);
    let normalized = normalize(&group).unwrap();
    assert_eq!(normalized["a"], vec![0.125, 0.5]);
    assert_eq!(normalized["b"], vec![0.25, 1.0]);
    // Idempotent: normalizing a normalized panel changes nothing.
    assert_eq!(normalize(&normalized).unwrap(), normalized);

    let zeros = BTreeMap::from([("z".to_string(), vec![0.0, 0.0])]);
    assert!(matches!(normalize(&zeros), Err(AnalyzerError::AllZero)));
}

#[test]
fn summary_statistics_match_hand_computations() {
    assert_eq!(mean(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
    assert_eq!(median(&[5.0, 1.0, 3.0]).unwrap(), 3.0);
    assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.0);
    let hundred: Vec<f64> = (1..=100).map(|i| i as f64).collect();
    assert_eq!(percentile(&hundred, 95.0).unwrap(), 95.0);
    assert_eq!(percentile(&hundred, 100.0).unwrap(), 100.0);
    assert_eq!(percentile(&[7.0], 50.0).unwrap(), 7.0);
    assert!(mean(&[]).is_err());
}

#[test]
fn persist_then_load_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.jsonl");
    let mut rng = SplitMix64::new(7);
    let records: Vec<ExecutionRecord> = (0..1000).map(|i| random_record(&mut rng, i)).collect();
    let meta = ExperimentMeta::new("exp-roundtrip", "{\"seed\":7}", 10);
    let written = persist_records(&meta, &records, &path).unwrap();
    assert_eq!(written, 1000);
    let (loaded_meta, loaded): (ExperimentMeta, Vec<ExecutionRecord>) =
        load_records(&path).unwrap();
    assert_eq!(loaded_meta, meta);
    assert_eq!(loaded, records);
}

#[test]
fn corrupt_line_is_reported_by_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.jsonl");
    let mut rng = SplitMix64::new(8);
    let records: Vec<ExecutionRecord> = (0..6).map(|i| random_record(&mut rng, i)).collect();
    let meta = ExperimentMeta::new("exp-corrupt", "{}", 10);
    persist_records(&meta, &records, &path).unwrap();
    let mut lines: Vec<String> = std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    lines[4] = "{\"not\": \"a record\"".to_string();
    std::fs::write(&path, lines.join("\n")).unwrap();
    match load_records::<ExecutionRecord>(&path) {
        Err(AnalyzerError::Malformed { line, .. }) => assert_eq!(line, 5),
        other => panic!("expected malformed line error, got {other:?}"),
    }
}

#[test]
fn schema_version_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.jsonl");
    let mut meta = ExperimentMeta::new("exp-schema", "{}", 10);
    meta.schema_version = SCHEMA_VERSION + 1;
    persist_records::<ExecutionRecord>(&meta, &[], &path).unwrap();
    assert!(matches!(
        load_records::<ExecutionRecord>(&path),
        Err(AnalyzerError::SchemaVersion { .. })
    ));
}

#[test]
fn aggregation_drops_invalid_records_but_counts_them() {
    let good = warm_record(
        WorkloadId::Fibonacci,
        RuntimeMode::NativeProcess,
        PayloadGroup::G1,
        100,
    );
    let mut failed = good.clone();
    failed.success = false;
    let mut inconsistent = good.clone();
    inconsistent.t_response_recv_ns = 0; // recv before sent
    let records = vec![good.clone(), good.clone(), failed, inconsistent];
    let report = build_report(&records).unwrap();
    assert_eq!(report.error_rate, 0.5);
    let (_, stats) = report.cells.iter().next().unwrap();
    assert_eq!(stats.sample_count, 2);
    assert_eq!(stats.invalid_count, 2);
    assert_eq!(stats.total_ns.mean, 100_000.0);
}

#[test]
fn mode_ratio_table_reproduces_reference_cells() {
    // Reference warm means in microseconds for prime-numbers at the
    // largest payload group: 26559 us interpreted vs 565 us ahead-of-time.
    let mut records = Vec::new();
    for _ in 0..10 {
        records.push(warm_record(
            WorkloadId::PrimeNumbers,
            RuntimeMode::BytecodeInterpreted,
            PayloadGroup::G3,
            26_559,
        ));
        records.push(warm_record(
            WorkloadId::PrimeNumbers,
            RuntimeMode::BytecodeAot,
            PayloadGroup::G3,
            565,
        ));
    }
    let report = build_report(&records).unwrap();
    let table = compare_modes(
        &report,
        Metric::Total,
        RuntimeMode::BytecodeInterpreted,
        RuntimeMode::BytecodeAot,
        StartKind::Warm,
    )
    .unwrap();
    assert_eq!(table.rows.len(), 1);
    let ratio = table.rows[0].ratio;
    assert!((ratio - 47.0).abs() / 47.0 < 0.005, "ratio {ratio}");

    // Reference image sizes in megabytes: 80.7 native vs 1.27 bytecode.
    let row = RatioRow::new("fibonacci-image", 80.7, 1.27);
    assert!((row.ratio - 63.5).abs() / 63.5 < 0.005, "ratio {}", row.ratio);
}

#[test]
fn missing_baseline_cell_is_an_error() {
    let records = vec![warm_record(
        WorkloadId::PrimeNumbers,
        RuntimeMode::BytecodeInterpreted,
        PayloadGroup::G3,
        1000,
    )];
    let report = build_report(&records).unwrap();
    assert!(matches!(
        compare_modes(
            &report,
            Metric::Total,
            RuntimeMode::BytecodeInterpreted,
            RuntimeMode::BytecodeAot,
            StartKind::Warm,
        ),
        Err(AnalyzerError::MissingCell(_))
    ));
}

#[test]
fn csv_emission_is_deterministic_and_reversible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let points = vec![
        PlotPoint::new("s2", 1.0, 0.5),
        PlotPoint::new("s1", 2.0, 0.25),
        PlotPoint::new("s1", 1.0, 0.75),
    ];
    let mut shuffled = points.clone();
    shuffled.reverse();
    emit_csv(&points, &a).unwrap();
    emit_csv(&shuffled, &b).unwrap();
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "same points must emit identical bytes"
    );
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("series,x,y\n"));
    let mut expected = points.clone();
    expected.sort_by(|p, q| (&p.series, p.x).partial_cmp(&(&q.series, q.x)).unwrap());
    assert_eq!(read_csv(&a).unwrap(), expected);

    let empty = dir.path().join("empty.csv");
    emit_csv(&[], &empty).unwrap();
    assert_eq!(std::fs::read_to_string(&empty).unwrap(), "series,x,y\n");
}

#[test]
fn ecdf_points_and_markdown_render() {
    let points = ecdf_points("latency", &ecdf(&[2.0, 1.0]).unwrap());
    assert_eq!(points[0], PlotPoint::new("latency", 1.0, 0.5));
    assert_eq!(points[1], PlotPoint::new("latency", 2.0, 1.0));

    let records = vec![
        warm_record(
            WorkloadId::Fibonacci,
            RuntimeMode::BytecodeInterpreted,
            PayloadGroup::G1,
            200,
        ),
        warm_record(
            WorkloadId::Fibonacci,
            RuntimeMode::BytecodeAot,
            PayloadGroup::G1,
            100,
        ),
    ];
    let report = build_report(&records).unwrap();
    let table = compare_modes(
        &report,
        Metric::Total,
        RuntimeMode::BytecodeInterpreted,
        RuntimeMode::BytecodeAot,
        StartKind::Warm,
    )
    .unwrap();
    let md = emit_markdown_table("interpreted vs aot", &table);
    assert!(md.contains("| interpreted vs aot |"));
    assert!(md.contains("2.0x"));
}
