//! Compiles the embedded kernel sources to freestanding wasm32 bytecode
//! modules with clang. Both this and the natively linked build go through
//! the same sources with contraction disabled, so a kernel produces
//! bit-identical output on every target.

use std::path::{Path, PathBuf};
use std::process::Command;

use lumos_core::WorkloadId;
use thiserror::Error;

use crate::kernel_src;

/// Shadow stack for the guest; the language-detection kernel keeps its
/// counting tables in locals (~160 KiB), so leave plenty of room.
const STACK_SIZE_BYTES: u32 = 4 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum WasmBuildError {
    #[error("no usable clang with wasm32 support: {0}")]
    ToolchainMissing(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("clang failed ({status}):\n{stderr}")]
    CompileFailed { status: String, stderr: String },
}

/// A probed clang capable of targeting wasm32.
#[derive(Debug, Clone)]
pub struct WasmToolchain {
    clang: PathBuf,
}

impl WasmToolchain {
    /// Uses `LUMOS_CLANG` when set, otherwise `clang` from PATH, and
    /// verifies it by compiling a one-line module.
    pub fn detect() -> Result<WasmToolchain, WasmBuildError> {
        let clang = std::env::var_os("LUMOS_CLANG")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("clang"));
        let toolchain = WasmToolchain { clang };
        toolchain.verify()?;
        Ok(toolchain)
    }

    fn verify(&self) -> Result<(), WasmBuildError> {
        let dir = tempfile::tempdir()?;
        let probe = dir.path().join("probe.c");
        std::fs::write(&probe, "int lumos_probe(int x) { return x + 1; }\n")?;
        let out = dir.path().join("probe.wasm");
        match self.run_clang(&[probe], &out) {
            Ok(()) => Ok(()),
            Err(WasmBuildError::CompileFailed { status, stderr }) => Err(
                WasmBuildError::ToolchainMissing(format!("{status}: {stderr}")),
            ),
            Err(WasmBuildError::Io(e)) => Err(WasmBuildError::ToolchainMissing(e.to_string())),
            Err(e) => Err(e),
        }
    }

    /// Compiles the bytecode module for one workload to `out`.
    pub fn compile_module(
        &self,
        workload: WorkloadId,
        out: &Path,
    ) -> Result<(), WasmBuildError> {
        let dir = tempfile::tempdir()?;
        let mut c_files = Vec::new();
        for (name, content) in kernel_src::module_sources(workload) {
            let path = dir.path().join(name);
            std::fs::write(&path, content)?;
            if name.ends_with(".c") {
                c_files.push(path);
            }
        }
        self.run_clang(&c_files, out)
    }

    fn run_clang(&self, sources: &[PathBuf], out: &Path) -> Result<(), WasmBuildError> {
        let output = Command::new(&self.clang)
            .arg("--target=wasm32")
            .arg("-nostdlib")
            .arg("-O2")
            .arg("-ffp-contract=off")
            .arg("-Wl,--no-entry")
            .arg("-Wl,--export-all")
            .arg(format!("-Wl,-z,stack-size={STACK_SIZE_BYTES}"))
            .arg("-o")
            .arg(out)
            .args(sources)
            .output()
            .map_err(|e| WasmBuildError::ToolchainMissing(format!("{}: {e}", self.clang.display())))?;
        if !output.status.success() {
            return Err(WasmBuildError::CompileFailed {
                status: output.status.to_string(),
                stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
            });
        }
        Ok(())
    }
}
