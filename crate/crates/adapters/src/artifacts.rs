//! Deployable artifact builds.
//!
//! The native mode ships a full process image, so its size is accounted as
//! the launch binary plus a fixed base layer standing in for the rest of a
//! container image. The bytecode modes ship just the kernel module (plus
//! its precompiled form for aot); the engine binary belongs to the platform,
//! not the deployment.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use lumos_core::{RuntimeMode, WorkloadId};
use lumos_workloads::WasmToolchain;

use crate::{locate_bin, AdapterError};

/// Size stand-in for the OS/userland layers under a native process image.
pub const DEFAULT_BASE_LAYER_BYTES: u64 = 79_400_000;

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub out_dir: PathBuf,
    pub base_layer_bytes: u64,
    /// Rebuild even when the outputs already exist.
    pub force: bool,
}

impl BuildOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        BuildOptions {
            out_dir: out_dir.into(),
            base_layer_bytes: DEFAULT_BASE_LAYER_BYTES,
            force: false,
        }
    }
}

/// Everything needed to launch and account for one workload in one mode.
#[derive(Debug, Clone)]
pub struct ArtifactInfo {
    pub mode: RuntimeMode,
    pub workload: WorkloadId,
    pub launch_binary: PathBuf,
    pub module_path: Option<PathBuf>,
    pub precompiled_path: Option<PathBuf>,
    /// Deployable artifact size in bytes.
    pub artifact_bytes: u64,
    pub build_ms: u64,
}

pub fn build_artifact(
    mode: RuntimeMode,
    workload: WorkloadId,
    options: &BuildOptions,
) -> Result<ArtifactInfo, AdapterError> {
    std::fs::create_dir_all(&options.out_dir)?;
    let started = Instant::now();
    match mode {
        RuntimeMode::NativeProcess => {
            let binary = locate_bin("lumos-fn")?;
            let binary_bytes = std::fs::metadata(&binary)?.len();
            Ok(ArtifactInfo {
                mode,
                workload,
                launch_binary: binary,
                module_path: None,
                precompiled_path: None,
                artifact_bytes: options.base_layer_bytes + binary_bytes,
                build_ms: started.elapsed().as_millis() as u64,
            })
        }
        RuntimeMode::BytecodeInterpreted => {
            let module = build_module(workload, options)?;
            Ok(ArtifactInfo {
                mode,
                workload,
                launch_binary: locate_bin("lumos-engine")?,
                artifact_bytes: std::fs::metadata(&module)?.len(),
                module_path: Some(module),
                precompiled_path: None,
                build_ms: started.elapsed().as_millis() as u64,
            })
        }
        RuntimeMode::BytecodeAot => {
            let module = build_module(workload, options)?;
            let precompiled = options.out_dir.join(format!("{}.cwasm", workload.name()));
            if options.force || !precompiled.is_file() {
                let engine = locate_bin("lumos-engine")?;
                let output = Command::new(&engine)
                    .arg("precompile")
                    .arg("--module")
                    .arg(&module)
                    .arg("--out")
                    .arg(&precompiled)
                    .output()?;
                if !output.status.success() {
                    return Err(AdapterError::Build(format!(
                        "precompile {}: {}",
                        workload.name(),
                        String::from_utf8_lossy(&output.stderr)
                    )));
                }
            }
            Ok(ArtifactInfo {
                mode,
                workload,
                launch_binary: locate_bin("lumos-engine")?,
                artifact_bytes: std::fs::metadata(&precompiled)?.len(),
                module_path: Some(module),
                precompiled_path: Some(precompiled),
                build_ms: started.elapsed().as_millis() as u64,
            })
        }
    }
}

fn build_module(workload: WorkloadId, options: &BuildOptions) -> Result<PathBuf, AdapterError> {
    let module = options.out_dir.join(format!("{}.wasm", workload.name()));
    if !options.force && module.is_file() {
        return Ok(module);
    }
    let toolchain = WasmToolchain::detect().map_err(|e| AdapterError::Build(e.to_string()))?;
    toolchain
        .compile_module(workload, &module)
        .map_err(|e| AdapterError::Build(e.to_string()))?;
    Ok(module)
}
