//! Trace replay: closed-loop worker pools for sequential/concurrent
//! patterns, open-loop offset dispatch for bursty ones. The executor is
//! caller-supplied so replay carries no runtime-adapter dependency.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::{InvocationTrace, TraceEntry};

#[derive(Debug)]
pub struct ReplayResult<R> {
    /// One outcome per trace entry, in entry order.
    pub outcomes: Vec<R>,
    pub makespan_ns: u64,
    /// Highest number of simultaneously in-flight invocations observed.
    pub max_in_flight: u64,
}

impl<R> ReplayResult<R> {
    /// Completed requests per second over the replay makespan.
    pub fn throughput_rps(&self) -> f64 {
        if self.outcomes.is_empty() || self.makespan_ns == 0 {
            return 0.0;
        }
        self.outcomes.len() as f64 / (self.makespan_ns as f64 / 1e9)
    }
}

struct InFlight {
    current: AtomicU64,
    max: AtomicU64,
    bound: Option<u64>,
}

impl InFlight {
    fn new(bound: Option<u64>) -> Self {
        InFlight {
            current: AtomicU64::new(0),
            max: AtomicU64::new(0),
            bound,
        }
    }

    fn enter(&self) {
        let now = self.current.fetch_add(1, Ordering::SeqCst) + 1;
        self.max.fetch_max(now, Ordering::SeqCst);
        if let Some(bound) = self.bound {
            assert!(
                now <= bound,
                "closed-loop bound violated: {now} in flight, bound {bound}"
            );
        }
    }

    fn exit(&self) {
        self.current.fetch_sub(1, Ordering::SeqCst);
    }
}

/// Replays a trace against `executor`, which is called once per entry with
/// the entry index. Per-entry failures are just outcomes; replay always
/// covers every entry.
pub fn replay<R, F>(trace: &InvocationTrace, executor: F) -> ReplayResult<R>
where
    R: Send,
    F: Fn(usize, &TraceEntry) -> R + Sync,
{
    if trace.entries.is_empty() {
        return ReplayResult {
            outcomes: Vec::new(),
            makespan_ns: 0,
            max_in_flight: 0,
        };
    }
    let in_flight = InFlight::new(trace.pattern.concurrency_bound());
    let slots: Mutex<Vec<Option<R>>> =
        Mutex::new((0..trace.entries.len()).map(|_| None).collect());
    let started = Instant::now();

    match trace.pattern.concurrency_bound() {
        Some(level) => {
            // Closed loop: `level` workers pull the next entry index.
            let next = AtomicUsize::new(0);
            let workers = (level as usize).min(trace.entries.len());
            std::thread::scope(|scope| {
                for _ in 0..workers {
                    scope.spawn(|| loop {
                        let index = next.fetch_add(1, Ordering::SeqCst);
                        let Some(entry) = trace.entries.get(index) else {
                            return;
                        };
                        in_flight.enter();
                        let outcome = executor(index, entry);
                        in_flight.exit();
                        slots.lock().unwrap()[index] = Some(outcome);
                    });
                }
            });
        }
        None => {
            // Open loop: honor each entry's offset regardless of completion.
            std::thread::scope(|scope| {
                for (index, entry) in trace.entries.iter().enumerate() {
                    let wait = Duration::from_nanos(entry.t_offset_ns)
                        .saturating_sub(started.elapsed());
                    if !wait.is_zero() {
                        std::thread::sleep(wait);
                    }
                    let in_flight = &in_flight;
                    let slots = &slots;
                    let executor = &executor;
                    scope.spawn(move || {
                        in_flight.enter();
                        let outcome = executor(index, entry);
                        in_flight.exit();
                        slots.lock().unwrap()[index] = Some(outcome);
                    });
                }
            });
        }
    }

    let makespan_ns = started.elapsed().as_nanos() as u64;
    let outcomes = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every entry executed"))
        .collect();
    ReplayResult {
        outcomes,
        makespan_ns,
        max_in_flight: in_flight.max.load(Ordering::SeqCst),
    }
}
