//! Instance lifecycle: spawn a workload process, wait for its readiness
//! line, invoke it over framed stdio, and shut it down without leaving
//! orphans.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use lumos_core::{read_frame, write_frame, Clock, RuntimeMode, WorkloadRequest, WorkloadResponse};

use crate::{AdapterError, ArtifactInfo};

pub const DEFAULT_READY_TIMEOUT: Duration = Duration::from_secs(30);
const SHUTDOWN_GRACE: Duration = Duration::from_secs(2);

/// One framed request/response exchange with its send/receive timestamps.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub response: WorkloadResponse,
    pub t_request_sent_ns: u64,
    pub t_response_recv_ns: u64,
}

#[derive(Debug)]
pub struct InstanceHandle {
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
    pub instance_id: String,
    pub pid: u32,
    pub mode: RuntimeMode,
    /// When the spawn was requested.
    pub t_submit_ns: u64,
    /// When the OS process existed.
    pub t_spawn_ns: u64,
    /// When the instance reported readiness.
    pub t_ready_ns: u64,
}

fn launch_command(artifact: &ArtifactInfo) -> Result<Command, AdapterError> {
    let mut command = Command::new(&artifact.launch_binary);
    match artifact.mode {
        RuntimeMode::NativeProcess => {}
        RuntimeMode::BytecodeInterpreted => {
            let module = artifact
                .module_path
                .as_ref()
                .ok_or_else(|| AdapterError::Protocol("interpreted artifact without module".into()))?;
            command
                .arg("serve")
                .arg("--engine")
                .arg("interpreted")
                .arg("--module")
                .arg(module);
        }
        RuntimeMode::BytecodeAot => {
            let precompiled = artifact.precompiled_path.as_ref().ok_or_else(|| {
                AdapterError::Protocol("aot artifact without precompiled module".into())
            })?;
            command
                .arg("serve")
                .arg("--engine")
                .arg("aot")
                .arg("--precompiled")
                .arg(precompiled);
        }
    }
    command
        .env("LUMOS_TRANSPORT", "stdio")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit());
    Ok(command)
}

/// Spawns an instance and blocks until its readiness line or the timeout.
/// On timeout the child is killed before returning.
pub fn spawn_instance(
    artifact: &ArtifactInfo,
    clock: &Clock,
    ready_timeout: Duration,
) -> Result<InstanceHandle, AdapterError> {
    let mut command = launch_command(artifact)?;
    let t_submit_ns = clock.now_ns();
    let mut child = command.spawn()?;
    let t_spawn_ns = clock.now_ns();
    let pid = child.id();
    let stdin = child.stdin.take().unwrap();
    let stdout = child.stdout.take().unwrap();

    // The readiness read happens on a helper thread so a hung child can't
    // block the harness past the timeout.
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let mut reader = BufReader::new(stdout);
        let mut line = String::new();
        let result = reader.read_line(&mut line).map(|_| (line, reader));
        let _ = tx.send(result);
    });
    let (line, stdout) = match rx.recv_timeout(ready_timeout) {
        Ok(Ok(pair)) => pair,
        Ok(Err(e)) => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(AdapterError::Io(e));
        }
        Err(_) => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(AdapterError::ReadyTimeout(ready_timeout));
        }
    };
    let t_ready_ns = clock.now_ns();
    let instance_id = match line.trim_end().strip_prefix("READY ") {
        Some(rest) => rest.split_whitespace().next().unwrap_or("").to_string(),
        None => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(AdapterError::Protocol(format!(
                "expected readiness line, got {line:?}"
            )));
        }
    };

    Ok(InstanceHandle {
        child,
        stdin: Some(stdin),
        stdout,
        instance_id,
        pid,
        mode: artifact.mode,
        t_submit_ns,
        t_spawn_ns,
        t_ready_ns,
    })
}

impl InstanceHandle {
    pub fn invoke(
        &mut self,
        request: &WorkloadRequest,
        clock: &Clock,
    ) -> Result<Invocation, AdapterError> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| AdapterError::Protocol("instance already shut down".into()))?;
        let t_request_sent_ns = clock.now_ns();
        write_frame(stdin, request)?;
        stdin.flush()?;
        let response: WorkloadResponse = read_frame(&mut self.stdout)?;
        let t_response_recv_ns = clock.now_ns();
        Ok(Invocation {
            response,
            t_request_sent_ns,
            t_response_recv_ns,
        })
    }

    /// Closes stdin and gives the instance a grace period to exit before
    /// killing it. Safe to call once; `Drop` covers the rest.
    pub fn shutdown(mut self) -> Result<bool, AdapterError> {
        drop(self.stdin.take());
        let deadline = Instant::now() + SHUTDOWN_GRACE;
        loop {
            if self.child.try_wait()?.is_some() {
                return Ok(true);
            }
            if Instant::now() >= deadline {
                self.child.kill()?;
                self.child.wait()?;
                return Ok(false);
            }
            std::thread::sleep(Duration::from_millis(5));
        }
    }
}

impl Drop for InstanceHandle {
    fn drop(&mut self) {
        if matches!(self.child.try_wait(), Ok(None)) {
            let _ = self.child.kill();
        }
        let _ = self.child.wait();
    }
}
