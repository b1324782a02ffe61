//! Built-in serverless workloads: deterministic dual-target kernels with a
//! phase probe, payload synthesis, and the instance serve loop.

pub mod kernel_src;
pub mod kernels;
pub mod payload;
pub mod provider;
pub mod server;
pub mod wasm_build;

pub use payload::{generate_payload, GeneratedPayload};
pub use provider::{KernelError, KernelOp, KernelProvider, NativeKernels, RunResult};
pub use server::{handle_request, serve, Transport};
pub use wasm_build::{WasmBuildError, WasmToolchain};

/// Language tags in kernel index order.
pub const LANG_TAGS: [&str; 3] = ["en", "de", "es"];
