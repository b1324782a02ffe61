//! The build manifest: one entry per (workload, mode) artifact.

use std::path::{Path, PathBuf};

use lumos_adapters::{build_artifact, ArtifactInfo, BuildOptions};
use lumos_core::{RuntimeMode, WorkloadId};
use serde::{Deserialize, Serialize};

use crate::{fatal, CliError, ExperimentConfig};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub workload: WorkloadId,
    pub mode: RuntimeMode,
    pub launch_binary: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precompiled_path: Option<PathBuf>,
    pub artifact_bytes: u64,
    pub build_ms: u64,
}

impl From<ArtifactInfo> for ManifestEntry {
    fn from(info: ArtifactInfo) -> ManifestEntry {
        ManifestEntry {
            workload: info.workload,
            mode: info.mode,
            launch_binary: info.launch_binary,
            module_path: info.module_path,
            precompiled_path: info.precompiled_path,
            artifact_bytes: info.artifact_bytes,
            build_ms: info.build_ms,
        }
    }
}

impl ManifestEntry {
    pub fn to_artifact(&self) -> ArtifactInfo {
        ArtifactInfo {
            mode: self.mode,
            workload: self.workload,
            launch_binary: self.launch_binary.clone(),
            module_path: self.module_path.clone(),
            precompiled_path: self.precompiled_path.clone(),
            artifact_bytes: self.artifact_bytes,
            build_ms: self.build_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub base_layer_bytes: u64,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn entry(&self, workload: WorkloadId, mode: RuntimeMode) -> Result<&ManifestEntry, CliError> {
        self.entries
            .iter()
            .find(|e| e.workload == workload && e.mode == mode)
            .ok_or_else(|| {
                CliError::Fatal(format!(
                    "manifest has no artifact for {} in {} mode; run `lumos build`",
                    workload,
                    mode.name()
                ))
            })
    }
}

pub fn load_manifest(artifacts_dir: &Path) -> Result<Manifest, CliError> {
    let path = artifacts_dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Fatal(format!("read {}: {e}; run `lumos build`", path.display())))?;
    serde_json::from_str(&text).map_err(fatal)
}

/// Builds the workload x mode matrix and writes the manifest. Failures are
/// collected per artifact; the manifest still covers everything that built.
pub fn cmd_build(config: &ExperimentConfig, force: bool, dry_run: bool) -> Result<Manifest, CliError> {
    let artifacts_dir = config.artifacts_dir();
    let mut options = BuildOptions::new(&artifacts_dir);
    options.base_layer_bytes = config.base_layer_bytes;
    options.force = force;

    if dry_run {
        for &workload in &config.workloads {
            for &mode in &config.modes {
                println!("plan: build {} [{}]", workload, mode.name());
            }
        }
        return Ok(Manifest {
            base_layer_bytes: config.base_layer_bytes,
            entries: Vec::new(),
        });
    }

    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for &workload in &config.workloads {
        for &mode in &config.modes {
            match build_artifact(mode, workload, &options) {
                Ok(info) => {
                    println!(
                        "built {} [{}]: {} bytes in {} ms",
                        workload,
                        mode.name(),
                        info.artifact_bytes,
                        info.build_ms
                    );
                    entries.push(ManifestEntry::from(info));
                }
                Err(e) => failures.push(format!("{} [{}]: {e}", workload, mode.name())),
            }
        }
    }
    // Keep artifacts from earlier builds with different matrices; entries
    // rebuilt now replace their previous versions.
    if let Ok(previous) = load_manifest(&artifacts_dir) {
        for old in previous.entries {
            if !entries
                .iter()
                .any(|e| e.workload == old.workload && e.mode == old.mode)
            {
                entries.push(old);
            }
        }
    }
    let manifest = Manifest {
        base_layer_bytes: config.base_layer_bytes,
        entries,
    };
    std::fs::create_dir_all(&artifacts_dir)?;
    std::fs::write(
        artifacts_dir.join(MANIFEST_FILE),
        serde_json::to_string_pretty(&manifest).map_err(fatal)?,
    )?;
    if !failures.is_empty() {
        return Err(CliError::Partial(failures.join("; ")));
    }
    Ok(manifest)
}
