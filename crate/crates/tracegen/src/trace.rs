//! Trace patterns and deterministic schedule generation.

use std::io::{BufRead, Write};

use lumos_core::{SplitMix64, WorkloadRequest};
use serde::{Deserialize, Serialize};

use crate::TraceError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TracePattern {
    /// `count` invocations, one at a time, back to back.
    Sequential { count: u64 },
    /// `count` invocations replayed closed-loop with at most `level` in
    /// flight.
    Concurrent { level: u64, count: u64 },
    /// Poisson arrivals at `base_rate_rps`, switching to `burst_rate_rps`
    /// during the first `burst_len_s` of every `period_s`, for
    /// `duration_s`; replayed open-loop on the sampled offsets.
    Burst {
        base_rate_rps: f64,
        burst_rate_rps: f64,
        burst_len_s: f64,
        period_s: f64,
        duration_s: f64,
    },
}

impl TracePattern {
    pub fn validate(&self) -> Result<(), TraceError> {
        let invalid = |msg: &str| Err(TraceError::InvalidPattern(msg.to_string()));
        match *self {
            TracePattern::Sequential { count } if count == 0 => invalid("count must be > 0"),
            TracePattern::Concurrent { level, count } if level == 0 || count == 0 => {
                invalid("level and count must be > 0")
            }
            TracePattern::Burst {
                base_rate_rps,
                burst_rate_rps,
                burst_len_s,
                period_s,
                duration_s,
            } => {
                if base_rate_rps <= 0.0 || burst_rate_rps <= 0.0 {
                    return invalid("rates must be > 0");
                }
                if burst_len_s <= 0.0 || period_s <= 0.0 || duration_s <= 0.0 {
                    return invalid("durations must be > 0");
                }
                if burst_len_s >= period_s {
                    return invalid("burst_len_s must be < period_s");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The in-flight bound during replay; open-loop patterns have none.
    pub fn concurrency_bound(&self) -> Option<u64> {
        match self {
            TracePattern::Sequential { .. } => Some(1),
            TracePattern::Concurrent { level, .. } => Some(*level),
            TracePattern::Burst { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub t_offset_ns: u64,
    pub request: WorkloadRequest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvocationTrace {
    pub seed: u64,
    pub pattern: TracePattern,
    pub entries: Vec<TraceEntry>,
}

/// Builds the schedule for a pattern; pure in (pattern, template, seed).
pub fn generate_trace(
    pattern: &TracePattern,
    template: &WorkloadRequest,
    seed: u64,
) -> Result<InvocationTrace, TraceError> {
    pattern.validate()?;
    let entries = match *pattern {
        TracePattern::Sequential { count } | TracePattern::Concurrent { count, .. } => (0..count)
            .map(|_| TraceEntry {
                t_offset_ns: 0,
                request: template.clone(),
            })
            .collect(),
        TracePattern::Burst {
            base_rate_rps,
            burst_rate_rps,
            burst_len_s,
            period_s,
            duration_s,
        } => {
            // Thinning: sample a homogeneous process at the peak rate and
            // accept each arrival with probability rate(t)/peak, which is
            // exact for the piecewise-constant rate profile.
            let mut rng = SplitMix64::new(seed);
            let mut entries = Vec::new();
            let peak = burst_rate_rps.max(base_rate_rps);
            let mut t = 0.0f64;
            loop {
                let u = rng.next_f64();
                t += -(1.0 - u).ln() / peak;
                if t >= duration_s {
                    break;
                }
                let in_burst = (t % period_s) < burst_len_s;
                let rate = if in_burst { burst_rate_rps } else { base_rate_rps };
                if rng.next_f64() * peak < rate {
                    entries.push(TraceEntry {
                        t_offset_ns: (t * 1e9) as u64,
                        request: template.clone(),
                    });
                }
            }
            entries
        }
    };
    Ok(InvocationTrace {
        seed,
        pattern: pattern.clone(),
        entries,
    })
}

#[derive(Serialize, Deserialize)]
struct TraceMeta {
    seed: u64,
    pattern: TracePattern,
}

impl InvocationTrace {
    /// One JSON object per line: a meta line, then the entries in order.
    pub fn write_jsonl<W: Write>(&self, mut writer: W) -> Result<(), TraceError> {
        let meta = TraceMeta {
            seed: self.seed,
            pattern: self.pattern.clone(),
        };
        writeln!(writer, "{}", serde_json::to_string(&meta).unwrap())?;
        for entry in &self.entries {
            writeln!(writer, "{}", serde_json::to_string(entry).unwrap())?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("in-memory write");
        buf
    }

    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<InvocationTrace, TraceError> {
        let mut lines = reader.lines().enumerate();
        let (_, first) = lines.next().ok_or(TraceError::Malformed {
            line: 1,
            message: "empty trace file".into(),
        })?;
        let meta: TraceMeta =
            serde_json::from_str(&first?).map_err(|e| TraceError::Malformed {
                line: 1,
                message: e.to_string(),
            })?;
        let mut entries = Vec::new();
        for (i, line) in lines {
            let entry: TraceEntry =
                serde_json::from_str(&line?).map_err(|e| TraceError::Malformed {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            entries.push(entry);
        }
        Ok(InvocationTrace {
            seed: meta.seed,
            pattern: meta.pattern,
            entries,
        })
    }
}
