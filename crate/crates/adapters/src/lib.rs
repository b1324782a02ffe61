//! Runtime adapters: one uniform surface for building deployable artifacts,
//! spawning workload instances, and invoking them, across the three runtime
//! modes.

pub mod artifacts;
pub mod instance;
pub mod locate;
pub mod measure;

pub use artifacts::{build_artifact, ArtifactInfo, BuildOptions, DEFAULT_BASE_LAYER_BYTES};
pub use instance::{spawn_instance, InstanceHandle, Invocation, DEFAULT_READY_TIMEOUT};
pub use locate::locate_bin;
pub use measure::{build_record, measure_cold, measure_warm};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("artifact build failed: {0}")]
    Build(String),
    #[error("binary not found near the running executable: {0}")]
    MissingBinary(String),
    #[error("instance not ready within {0:?}")]
    ReadyTimeout(std::time::Duration),
    #[error("frame error: {0}")]
    Frame(#[from] lumos_core::FrameError),
    #[error("protocol error: {0}")]
    Protocol(String),
}
