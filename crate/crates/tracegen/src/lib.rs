//! Seeded, replayable invocation schedules: sequential, fixed-concurrency
//! (closed-loop), and bursty Poisson arrivals (open-loop).

pub mod replay;
pub mod trace;

pub use replay::{replay, ReplayResult};
pub use trace::{generate_trace, InvocationTrace, TraceEntry, TracePattern};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("trace line {line}: {message}")]
    Malformed { line: usize, message: String },
}
