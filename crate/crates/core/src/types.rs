//! Domain types shared across the harness: workloads, payload groups,
//! invocation requests/responses, and runtime mode identifiers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The eight built-in serverless workloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WorkloadId {
    #[serde(rename = "audio-generation")]
    AudioGeneration,
    #[serde(rename = "fuzzy-search")]
    FuzzySearch,
    #[serde(rename = "language-detection")]
    LanguageDetection,
    #[serde(rename = "encrypt-message")]
    EncryptMessage,
    #[serde(rename = "decrypt-message")]
    DecryptMessage,
    #[serde(rename = "fibonacci")]
    Fibonacci,
    #[serde(rename = "prime-numbers")]
    PrimeNumbers,
    #[serde(rename = "mandelbrot-bitmap")]
    MandelbrotBitmap,
}

impl WorkloadId {
    pub const ALL: [WorkloadId; 8] = [
        WorkloadId::AudioGeneration,
        WorkloadId::FuzzySearch,
        WorkloadId::LanguageDetection,
        WorkloadId::EncryptMessage,
        WorkloadId::DecryptMessage,
        WorkloadId::Fibonacci,
        WorkloadId::PrimeNumbers,
        WorkloadId::MandelbrotBitmap,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            WorkloadId::AudioGeneration => "audio-generation",
            WorkloadId::FuzzySearch => "fuzzy-search",
            WorkloadId::LanguageDetection => "language-detection",
            WorkloadId::EncryptMessage => "encrypt-message",
            WorkloadId::DecryptMessage => "decrypt-message",
            WorkloadId::Fibonacci => "fibonacci",
            WorkloadId::PrimeNumbers => "prime-numbers",
            WorkloadId::MandelbrotBitmap => "mandelbrot-bitmap",
        }
    }

    /// Integer-sized workloads take an element count N instead of a byte payload.
    pub fn is_integer_sized(&self) -> bool {
        matches!(self, WorkloadId::Fibonacci | WorkloadId::PrimeNumbers)
    }

    /// High-I/O classification: data-intensive workloads that move their
    /// payload through the ingress path.
    pub fn is_high_io(&self) -> bool {
        matches!(
            self,
            WorkloadId::AudioGeneration
                | WorkloadId::FuzzySearch
                | WorkloadId::LanguageDetection
                | WorkloadId::MandelbrotBitmap
        )
    }
}

impl fmt::Display for WorkloadId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WorkloadId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WorkloadId::ALL
            .iter()
            .copied()
            .find(|w| w.name() == s)
            .ok_or_else(|| format!("unknown workload id: {s}"))
    }
}

/// Payload size group. Byte-sized workloads map to {512 KiB, 1 MiB, 2 MiB};
/// integer-sized workloads (fibonacci, prime-numbers) map to N in
/// {10_000, 100_000, 1_000_000}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum PayloadGroup {
    G1,
    G2,
    G3,
}

impl PayloadGroup {
    pub const ALL: [PayloadGroup; 3] = [PayloadGroup::G1, PayloadGroup::G2, PayloadGroup::G3];

    pub fn index(&self) -> u8 {
        match self {
            PayloadGroup::G1 => 1,
            PayloadGroup::G2 => 2,
            PayloadGroup::G3 => 3,
        }
    }

    /// Byte count for byte-sized workloads.
    pub fn payload_bytes(&self) -> usize {
        match self {
            PayloadGroup::G1 => 524_288,
            PayloadGroup::G2 => 1_048_576,
            PayloadGroup::G3 => 2_097_152,
        }
    }

    /// Element count N for integer-sized workloads.
    pub fn integer_n(&self) -> u64 {
        match self {
            PayloadGroup::G1 => 10_000,
            PayloadGroup::G2 => 100_000,
            PayloadGroup::G3 => 1_000_000,
        }
    }
}

impl TryFrom<u8> for PayloadGroup {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(PayloadGroup::G1),
            2 => Ok(PayloadGroup::G2),
            3 => Ok(PayloadGroup::G3),
            other => Err(format!("payload group must be 1..=3, got {other}")),
        }
    }
}

impl From<PayloadGroup> for u8 {
    fn from(g: PayloadGroup) -> u8 {
        g.index()
    }
}

impl fmt::Display for PayloadGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Runtime execution mode of a workload artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuntimeMode {
    #[serde(rename = "native-process")]
    NativeProcess,
    #[serde(rename = "bytecode-interpreted")]
    BytecodeInterpreted,
    #[serde(rename = "bytecode-aot")]
    BytecodeAot,
}

impl RuntimeMode {
    pub const ALL: [RuntimeMode; 3] = [
        RuntimeMode::NativeProcess,
        RuntimeMode::BytecodeInterpreted,
        RuntimeMode::BytecodeAot,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RuntimeMode::NativeProcess => "native-process",
            RuntimeMode::BytecodeInterpreted => "bytecode-interpreted",
            RuntimeMode::BytecodeAot => "bytecode-aot",
        }
    }

    pub fn is_bytecode(&self) -> bool {
        !matches!(self, RuntimeMode::NativeProcess)
    }
}

impl fmt::Display for RuntimeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuntimeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuntimeMode::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown runtime mode: {s}"))
    }
}

/// Whether an invocation was served by a fresh instance or a reused one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartKind {
    Cold,
    Warm,
}

impl StartKind {
    pub fn name(&self) -> &'static str {
        match self {
            StartKind::Cold => "cold",
            StartKind::Warm => "warm",
        }
    }
}

impl fmt::Display for StartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// BaaS endpoint reference carried inside a request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageRef {
    pub host: String,
    pub port: u16,
    pub key: String,
}

/// One invocation payload as framed to a workload instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadRequest {
    pub workload: WorkloadId,
    pub group: PayloadGroup,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload_b64: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub storage: Option<StorageRef>,
}

impl WorkloadRequest {
    pub fn new(workload: WorkloadId, group: PayloadGroup) -> Self {
        WorkloadRequest {
            workload,
            group,
            params: BTreeMap::new(),
            payload_b64: None,
            storage: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_inline_payload(mut self, bytes: &[u8]) -> Self {
        use base64::Engine as _;
        self.payload_b64 = Some(base64::engine::general_purpose::STANDARD.encode(bytes));
        self
    }
}

/// Per-phase durations reported by the in-function probe. Fields not
/// applicable to a workload are exactly zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub io_fetch_ns: u64,
    pub deserialize_ns: u64,
    pub compute_ns: u64,
    pub serialize_ns: u64,
    pub io_store_ns: u64,
}

impl PhaseTimings {
    pub fn sum(&self) -> u64 {
        self.io_fetch_ns
            + self.deserialize_ns
            + self.compute_ns
            + self.serialize_ns
            + self.io_store_ns
    }
}

/// Stable error codes carried on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WireErrorCode {
    InvalidParams,
    InsufficientInput,
    UnknownWorkload,
    MalformedFrame,
    StorageError,
    Internal,
}

impl fmt::Display for WireErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WireErrorCode::InvalidParams => "invalid-params",
            WireErrorCode::InsufficientInput => "insufficient-input",
            WireErrorCode::UnknownWorkload => "unknown-workload",
            WireErrorCode::MalformedFrame => "malformed-frame",
            WireErrorCode::StorageError => "storage-error",
            WireErrorCode::Internal => "internal",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireError {
    pub code: WireErrorCode,
    pub message: String,
}

/// Probe-instrumented result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadResponse {
    pub status: ResponseStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<WireError>,
    pub output_len: u64,
    /// FNV-1a 64-bit checksum of the output bytes, hex-encoded.
    pub output_digest: String,
    pub phases: PhaseTimings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseStatus {
    Ok,
    Error,
}

impl WorkloadResponse {
    pub fn ok(output: &[u8], phases: PhaseTimings) -> Self {
        WorkloadResponse {
            status: ResponseStatus::Ok,
            error: None,
            output_len: output.len() as u64,
            output_digest: format!("{:016x}", crate::digest::fnv1a64(output)),
            phases,
        }
    }

    /// Variant for outputs whose digest was computed incrementally.
    pub fn ok_digest(output_len: u64, digest: u64, phases: PhaseTimings) -> Self {
        WorkloadResponse {
            status: ResponseStatus::Ok,
            error: None,
            output_len,
            output_digest: format!("{digest:016x}"),
            phases,
        }
    }

    pub fn err(code: WireErrorCode, message: impl Into<String>) -> Self {
        WorkloadResponse {
            status: ResponseStatus::Error,
            error: Some(WireError {
                code,
                message: message.into(),
            }),
            output_len: 0,
            output_digest: "0000000000000000".to_string(),
            phases: PhaseTimings::default(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == ResponseStatus::Ok
    }
}
