use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use lumos_core::{PayloadGroup, WorkloadId, WorkloadRequest};
use lumos_tracegen::{generate_trace, replay, InvocationTrace, TraceError, TracePattern};

fn template() -> WorkloadRequest {
    WorkloadRequest::new(WorkloadId::Fibonacci, PayloadGroup::G1).with_param("n", "10")
}

fn reference_burst() -> TracePattern {
    TracePattern::Burst {
        base_rate_rps: 2.0,
        burst_rate_rps: 20.0,
        burst_len_s: 1.0,
        period_s: 10.0,
        duration_s: 60.0,
    }
}

#[test]
fn sequential_trace_has_count_entries_at_offset_zero() {
    let trace = generate_trace(&TracePattern::Sequential { count: 10 }, &template(), 1).unwrap();
    assert_eq!(trace.entries.len(), 10);
    assert!(trace.entries.iter().all(|e| e.t_offset_ns == 0));
}

#[test]
fn same_pattern_and_seed_give_byte_identical_traces() {
    let a = generate_trace(&reference_burst(), &template(), 4242).unwrap();
    let b = generate_trace(&reference_burst(), &template(), 4242).unwrap();
    assert_eq!(a.to_jsonl(), b.to_jsonl());

    let c = generate_trace(&reference_burst(), &template(), 4243).unwrap();
    assert_ne!(a.to_jsonl(), c.to_jsonl());
}

#[test]
fn burst_offsets_are_nondecreasing_and_within_duration() {
    let trace = generate_trace(&reference_burst(), &template(), 7).unwrap();
    let max_ns = 60_000_000_000u64;
    assert!(trace
        .entries
        .windows(2)
        .all(|w| w[0].t_offset_ns <= w[1].t_offset_ns));
    assert!(trace.entries.iter().all(|e| e.t_offset_ns < max_ns));
}

#[test]
fn burst_counts_match_the_poisson_expectation() {
    // Expected arrivals: 2 rps for 54 s plus 20 rps for 6 s of bursts = 228.
    let expectation: f64 = 228.0;
    let sigma = expectation.sqrt();
    let mut total = 0.0;
    for seed in 0..20u64 {
        let trace = generate_trace(&reference_burst(), &template(), seed).unwrap();
        let count = trace.entries.len() as f64;
        assert!(
            (count - expectation).abs() <= 3.0 * sigma,
            "seed {seed}: count {count}"
        );
        total += count;
    }
    let mean = total / 20.0;
    // The mean over 20 seeds gets a sqrt(20) tighter bound.
    assert!(
        (mean - expectation).abs() <= 3.0 * sigma / 20.0_f64.sqrt(),
        "mean {mean}"
    );
}

#[test]
fn invalid_patterns_are_rejected() {
    let invalid = [
        TracePattern::Sequential { count: 0 },
        TracePattern::Concurrent { level: 0, count: 5 },
        TracePattern::Burst {
            base_rate_rps: 0.0,
            burst_rate_rps: 20.0,
            burst_len_s: 1.0,
            period_s: 10.0,
            duration_s: 60.0,
        },
        TracePattern::Burst {
            base_rate_rps: 2.0,
            burst_rate_rps: 20.0,
            burst_len_s: 10.0,
            period_s: 10.0,
            duration_s: 60.0,
        },
    ];
    for pattern in invalid {
        assert!(matches!(
            generate_trace(&pattern, &template(), 1),
            Err(TraceError::InvalidPattern(_))
        ));
    }
}

#[test]
fn jsonl_roundtrips() {
    let trace = generate_trace(&reference_burst(), &template(), 99).unwrap();
    let bytes = trace.to_jsonl();
    let back = InvocationTrace::read_jsonl(&bytes[..]).unwrap();
    assert_eq!(trace, back);
}

#[test]
fn corrupt_trace_line_reports_its_number() {
    let trace = generate_trace(&TracePattern::Sequential { count: 3 }, &template(), 1).unwrap();
    let mut bytes = trace.to_jsonl();
    let mut lines: Vec<&[u8]> = bytes.split(|&b| b == b'\n').collect();
    lines[2] = b"{broken";
    bytes = lines.join(&b'\n');
    match InvocationTrace::read_jsonl(&bytes[..]) {
        Err(TraceError::Malformed { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected malformed error, got {other:?}"),
    }
}

#[test]
fn sequential_replay_preserves_submission_order() {
    let trace = generate_trace(&TracePattern::Sequential { count: 20 }, &template(), 1).unwrap();
    let order = Mutex::new(Vec::new());
    let result = replay(&trace, |index, _entry| {
        order.lock().unwrap().push(index);
        index
    });
    assert_eq!(result.outcomes, (0..20).collect::<Vec<_>>());
    assert_eq!(*order.lock().unwrap(), (0..20).collect::<Vec<_>>());
    assert_eq!(result.max_in_flight, 1);
}

#[test]
fn closed_loop_replay_respects_and_reaches_the_bound() {
    let trace = generate_trace(
        &TracePattern::Concurrent {
            level: 4,
            count: 40,
        },
        &template(),
        1,
    )
    .unwrap();
    let result = replay(&trace, |index, _entry| {
        std::thread::sleep(Duration::from_millis(3));
        index
    });
    assert_eq!(result.outcomes.len(), 40);
    assert!(result.max_in_flight <= 4, "{}", result.max_in_flight);
    assert!(result.max_in_flight >= 2, "{}", result.max_in_flight);
    assert!(result.throughput_rps() > 0.0);
}

#[test]
fn failures_are_outcomes_and_replay_continues() {
    let trace = generate_trace(&TracePattern::Sequential { count: 10 }, &template(), 1).unwrap();
    let result = replay(&trace, |index, _entry| {
        if index % 3 == 0 {
            Err(format!("entry {index} failed"))
        } else {
            Ok(index)
        }
    });
    assert_eq!(result.outcomes.len(), trace.entries.len());
    assert_eq!(result.outcomes.iter().filter(|o| o.is_err()).count(), 4);
}

#[test]
fn open_loop_replay_honors_offsets() {
    let pattern = TracePattern::Burst {
        base_rate_rps: 100.0,
        burst_rate_rps: 1000.0,
        burst_len_s: 0.05,
        period_s: 0.2,
        duration_s: 0.3,
    };
    let trace = generate_trace(&pattern, &template(), 11).unwrap();
    assert!(!trace.entries.is_empty());
    let concurrent_seen = AtomicU64::new(0);
    let result = replay(&trace, |_, _| {
        std::thread::sleep(Duration::from_millis(20));
        concurrent_seen.fetch_add(1, Ordering::SeqCst);
    });
    let last_offset = trace.entries.last().unwrap().t_offset_ns;
    assert!(result.makespan_ns >= last_offset);
    assert_eq!(
        concurrent_seen.load(Ordering::SeqCst),
        trace.entries.len() as u64
    );
    // Open loop: slow handlers overlap instead of delaying dispatch.
    assert!(result.max_in_flight > 1);
}

#[test]
fn empty_trace_replays_to_nothing() {
    let trace = InvocationTrace {
        seed: 0,
        pattern: TracePattern::Sequential { count: 1 },
        entries: Vec::new(),
    };
    let result = replay(&trace, |index, _| index);
    assert!(result.outcomes.is_empty());
    assert_eq!(result.throughput_rps(), 0.0);
}
