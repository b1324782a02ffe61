//! Per-process resource telemetry from procfs: cumulative CPU time and
//! resident memory, sampled on an interval by a background thread and
//! attributed to instances by pid and instance id.

use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use lumos_core::Clock;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_SAMPLE_INTERVAL: Duration = Duration::from_millis(50);

#[derive(Debug, Error)]
pub enum TelemetryError {
    #[error("pid {0} not found")]
    PidNotFound(u32),
    #[error("procfs parse error for pid {pid}: {message}")]
    Parse { pid: u32, message: String },
    #[error("no samples in window")]
    EmptyWindow,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetrySample {
    pub pid: u32,
    pub instance_id: String,
    pub t_sample_ns: u64,
    /// Cumulative user+system CPU time of the process.
    pub cpu_time_ns: u64,
    pub rss_bytes: u64,
    /// Resident high-water mark, when the kernel exposes one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hwm_bytes: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceUsage {
    pub instance_id: String,
    pub t0_ns: u64,
    pub t1_ns: u64,
    pub cpu_time_delta_ns: u64,
    pub peak_rss_bytes: u64,
    pub mean_rss_bytes: u64,
    pub sample_count: usize,
    /// Set when the window holds fewer than two samples.
    pub low_confidence: bool,
}

fn ticks_per_second() -> u64 {
    // SAFETY: sysconf is always safe to call.
    let ticks = unsafe { libc::sysconf(libc::_SC_CLK_TCK) };
    if ticks > 0 {
        ticks as u64
    } else {
        100
    }
}

fn page_bytes() -> u64 {
    let page = unsafe { libc::sysconf(libc::_SC_PAGESIZE) };
    if page > 0 {
        page as u64
    } else {
        4096
    }
}

/// Reads cumulative CPU time (ns) and resident set (bytes) for a pid.
pub fn read_process_stats(pid: u32) -> Result<(u64, u64), TelemetryError> {
    let stat = std::fs::read_to_string(format!("/proc/{pid}/stat"))
        .map_err(|_| TelemetryError::PidNotFound(pid))?;
    // The comm field may contain spaces; fields count from after its ')'.
    let after_comm = stat
        .rsplit_once(')')
        .map(|(_, rest)| rest)
        .ok_or_else(|| TelemetryError::Parse {
            pid,
            message: "missing comm delimiter".into(),
        })?;
    let fields: Vec<&str> = after_comm.split_whitespace().collect();
    // Relative to the post-comm fields: utime is index 11, stime 12, rss 21.
    let parse = |idx: usize| -> Result<u64, TelemetryError> {
        fields
            .get(idx)
            .and_then(|f| f.parse::<u64>().ok())
            .ok_or_else(|| TelemetryError::Parse {
                pid,
                message: format!("stat field {idx}"),
            })
    };
    let utime = parse(11)?;
    let stime = parse(12)?;
    let rss_pages = parse(21)?;
    let cpu_ns = (utime + stime) * 1_000_000_000 / ticks_per_second();
    Ok((cpu_ns, rss_pages * page_bytes()))
}

/// Reads the VmHWM line (peak resident size) from /proc/<pid>/status.
pub fn read_peak_rss(pid: u32) -> Option<u64> {
    let status = std::fs::read_to_string(format!("/proc/{pid}/status")).ok()?;
    for line in status.lines() {
        if let Some(rest) = line.strip_prefix("VmHWM:") {
            let kb: u64 = rest.trim().trim_end_matches("kB").trim().parse().ok()?;
            return Some(kb * 1024);
        }
    }
    None
}

pub struct Sampler {
    pid: u32,
    instance_id: String,
    clock: Clock,
    stop: Arc<AtomicBool>,
    samples: Arc<Mutex<Vec<TelemetrySample>>>,
    thread: Option<JoinHandle<()>>,
}

/// Samples `pid` every `interval` until stopped. Fails fast if the pid is
/// already gone; a pid that dies later just ends the sample stream.
pub fn start_sampling(
    pid: u32,
    instance_id: &str,
    interval: Duration,
    clock: Clock,
) -> Result<Sampler, TelemetryError> {
    if !Path::new(&format!("/proc/{pid}")).exists() {
        return Err(TelemetryError::PidNotFound(pid));
    }
    let stop = Arc::new(AtomicBool::new(false));
    let samples = Arc::new(Mutex::new(Vec::new()));
    let instance_id = instance_id.to_string();
    let thread = {
        let stop = Arc::clone(&stop);
        let samples = Arc::clone(&samples);
        let instance_id = instance_id.clone();
        std::thread::spawn(move || {
            while !stop.load(Ordering::SeqCst) {
                let t_sample_ns = clock.now_ns();
                match read_process_stats(pid) {
                    Ok((cpu_time_ns, rss_bytes)) => {
                        samples.lock().unwrap().push(TelemetrySample {
                            pid,
                            instance_id: instance_id.clone(),
                            t_sample_ns,
                            cpu_time_ns,
                            rss_bytes,
                            hwm_bytes: read_peak_rss(pid),
                        });
                    }
                    Err(_) => break, // process exited
                }
                std::thread::sleep(interval);
            }
        })
    };
    Ok(Sampler {
        pid,
        instance_id,
        clock,
        stop,
        samples,
        thread: Some(thread),
    })
}

impl Sampler {
    /// Stops sampling and returns everything collected, closing with one
    /// final sample if the process is still alive so short windows still
    /// see a CPU delta. Idempotent; later calls return the same samples.
    pub fn stop(&mut self) -> Vec<TelemetrySample> {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
            if let Ok((cpu_time_ns, rss_bytes)) = read_process_stats(self.pid) {
                self.samples.lock().unwrap().push(TelemetrySample {
                    pid: self.pid,
                    instance_id: self.instance_id.clone(),
                    t_sample_ns: self.clock.now_ns(),
                    cpu_time_ns,
                    rss_bytes,
                    hwm_bytes: read_peak_rss(self.pid),
                });
            }
        }
        self.samples.lock().unwrap().clone()
    }
}

impl Drop for Sampler {
    fn drop(&mut self) {
        self.stop();
    }
}

/// Aggregates the samples falling inside [t0_ns, t1_ns].
pub fn aggregate(
    samples: &[TelemetrySample],
    t0_ns: u64,
    t1_ns: u64,
) -> Result<ResourceUsage, TelemetryError> {
    let window: Vec<&TelemetrySample> = samples
        .iter()
        .filter(|s| s.t_sample_ns >= t0_ns && s.t_sample_ns <= t1_ns)
        .collect();
    let (Some(first), Some(last)) = (window.first(), window.last()) else {
        return Err(TelemetryError::EmptyWindow);
    };
    let peak_sampled = window.iter().map(|s| s.rss_bytes).max().unwrap_or(0);
    let peak_hwm = window.iter().filter_map(|s| s.hwm_bytes).max().unwrap_or(0);
    let mean_rss_bytes =
        window.iter().map(|s| s.rss_bytes).sum::<u64>() / window.len() as u64;
    Ok(ResourceUsage {
        instance_id: first.instance_id.clone(),
        t0_ns,
        t1_ns,
        cpu_time_delta_ns: last.cpu_time_ns.saturating_sub(first.cpu_time_ns),
        peak_rss_bytes: peak_sampled.max(peak_hwm),
        mean_rss_bytes,
        sample_count: window.len(),
        low_confidence: window.len() < 2,
    })
}
