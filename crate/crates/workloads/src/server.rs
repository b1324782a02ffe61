//! Instance serve loop: readiness line, then length-prefixed
//! request/response frames over stdio or a local socket, with the phase
//! probe timed around fetch, decode, compute, encode, and store.

use std::io::{BufReader, BufWriter, Read, Write};
use std::net::TcpListener;
use std::str::FromStr;
use std::time::Instant;

use base64::Engine as _;
use lumos_baas::BaasClient;
use lumos_core::{
    read_frame, write_frame, FrameError, PhaseTimings, WireErrorCode, WorkloadId, WorkloadRequest,
    WorkloadResponse,
};

use crate::kernels::MAX_QUERY_BYTES;
use crate::provider::{KernelError, KernelOp, KernelProvider, RunResult};
use crate::LANG_TAGS;

/// How an instance talks to its adapter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transport {
    Stdio,
    /// Listen on 127.0.0.1:port; port 0 picks one (reported on the READY line
    /// as `READY <instance-id> PORT <port>`).
    Socket(u16),
}

impl FromStr for Transport {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "stdio" {
            return Ok(Transport::Stdio);
        }
        if let Some(port) = s.strip_prefix("socket:") {
            return port
                .parse::<u16>()
                .map(Transport::Socket)
                .map_err(|e| format!("bad socket port: {e}"));
        }
        Err(format!("unknown transport: {s}"))
    }
}

/// Runs the serve loop until the peer closes the connection. Never returns
/// on a per-request error; malformed frames get an error response.
pub fn serve(
    transport: Transport,
    provider: &mut dyn KernelProvider,
    instance_id: &str,
) -> std::io::Result<()> {
    match transport {
        Transport::Stdio => {
            let stdin = std::io::stdin();
            let stdout = std::io::stdout();
            let mut writer = BufWriter::new(stdout.lock());
            writeln!(writer, "READY {instance_id}")?;
            writer.flush()?;
            serve_frames(BufReader::new(stdin.lock()), writer, provider)
        }
        Transport::Socket(port) => {
            let listener = TcpListener::bind(("127.0.0.1", port))?;
            let port = listener.local_addr()?.port();
            println!("READY {instance_id} PORT {port}");
            std::io::stdout().flush()?;
            let (stream, _) = listener.accept()?;
            let reader = BufReader::new(stream.try_clone()?);
            serve_frames(reader, BufWriter::new(stream), provider)
        }
    }
}

fn serve_frames<R: Read, W: Write>(
    mut reader: R,
    mut writer: W,
    provider: &mut dyn KernelProvider,
) -> std::io::Result<()> {
    loop {
        let request: WorkloadRequest = match read_frame(&mut reader) {
            Ok(r) => r,
            Err(FrameError::Malformed(e)) => {
                // Frame body was consumed, the stream is still in sync.
                let resp =
                    WorkloadResponse::err(WireErrorCode::MalformedFrame, e.to_string());
                write_frame(&mut writer, &resp).map_err(io_of)?;
                continue;
            }
            Err(e) if e.is_eof() => return Ok(()),
            Err(FrameError::Io(e)) => return Err(e),
            Err(e) => {
                let resp = WorkloadResponse::err(WireErrorCode::MalformedFrame, e.to_string());
                write_frame(&mut writer, &resp).map_err(io_of)?;
                return Ok(());
            }
        };
        let response = handle_request(&request, provider);
        write_frame(&mut writer, &response).map_err(io_of)?;
    }
}

fn io_of(e: FrameError) -> std::io::Error {
    match e {
        FrameError::Io(io) => io,
        other => std::io::Error::other(other.to_string()),
    }
}

/// Executes one request against a kernel provider, populating the phase
/// probe. Pure with respect to the provider and any configured storage.
pub fn handle_request(
    request: &WorkloadRequest,
    provider: &mut dyn KernelProvider,
) -> WorkloadResponse {
    let mut phases = PhaseTimings::default();

    // io_fetch: pull the payload from storage when a key is referenced.
    let fetched: Option<Vec<u8>>;
    if let Some(storage) = &request.storage {
        if request.payload_b64.is_some() {
            return WorkloadResponse::err(
                WireErrorCode::InvalidParams,
                "exactly one of inline payload and storage key may be set",
            );
        }
        let t = Instant::now();
        let mut client = BaasClient::new(&storage.host, storage.port);
        match client.get(&storage.key) {
            Ok(bytes) => {
                phases.io_fetch_ns = t.elapsed().as_nanos() as u64;
                fetched = Some(bytes);
            }
            Err(e) => {
                return WorkloadResponse::err(
                    WireErrorCode::StorageError,
                    format!("fetch {}: {e}", storage.key),
                )
            }
        }
    } else {
        fetched = None;
    }

    // deserialize: decode the inline payload and stage kernel input.
    let t = Instant::now();
    let input: Option<Vec<u8>> = match (&request.payload_b64, fetched) {
        (Some(b64), None) => {
            match base64::engine::general_purpose::STANDARD.decode(b64.as_bytes()) {
                Ok(bytes) => Some(bytes),
                Err(e) => {
                    return WorkloadResponse::err(
                        WireErrorCode::InvalidParams,
                        format!("payload_b64: {e}"),
                    )
                }
            }
        }
        (None, Some(bytes)) => Some(bytes),
        (None, None) => None,
        (Some(_), Some(_)) => unreachable!(),
    };

    let op = match build_op(request, input.as_deref()) {
        Ok(op) => op,
        Err(resp) => return *resp,
    };
    if op_consumes_input(&op) {
        let Some(input) = input.as_deref() else {
            return WorkloadResponse::err(
                WireErrorCode::InvalidParams,
                "workload requires an inline payload or a storage key",
            );
        };
        if let Err(e) = provider.prepare(input) {
            return kernel_error(e);
        }
    }
    phases.deserialize_ns = t.elapsed().as_nanos() as u64;

    // compute
    let t = Instant::now();
    let result = match provider.run(&op) {
        Ok(r) => r,
        Err(e) => return kernel_error(e),
    };
    phases.compute_ns = t.elapsed().as_nanos() as u64;

    // serialize: render or extract output bytes and checksum them.
    let t = Instant::now();
    let output: Vec<u8> = match result {
        RunResult::Scalar(v) => v.to_string().into_bytes(),
        RunResult::LangIndex(Some(idx)) => LANG_TAGS
            .get(idx)
            .unwrap_or(&"unknown")
            .as_bytes()
            .to_vec(),
        RunResult::LangIndex(None) => {
            return WorkloadResponse::err(
                WireErrorCode::InsufficientInput,
                "language detection needs at least 3 bytes",
            )
        }
        RunResult::Buffer { .. } => match provider.take_output() {
            Ok(bytes) => bytes,
            Err(e) => return kernel_error(e),
        },
    };
    let mut response = WorkloadResponse::ok(&output, phases);
    response.phases.serialize_ns = t.elapsed().as_nanos() as u64;

    // io_store: optionally push the output back to storage.
    if let Some(store_key) = request.params.get("store_key") {
        let Some(storage) = &request.storage else {
            return WorkloadResponse::err(
                WireErrorCode::InvalidParams,
                "store_key set without a storage endpoint",
            );
        };
        let t = Instant::now();
        let mut client = BaasClient::new(&storage.host, storage.port);
        if let Err(e) = client.put(store_key, &output) {
            return WorkloadResponse::err(
                WireErrorCode::StorageError,
                format!("store {store_key}: {e}"),
            );
        }
        response.phases.io_store_ns = t.elapsed().as_nanos() as u64;
    }

    response
}

fn op_consumes_input(op: &KernelOp) -> bool {
    matches!(
        op,
        KernelOp::Xcrypt { .. } | KernelOp::FuzzyCount { .. } | KernelOp::LangDetect
    )
}

fn build_op(
    request: &WorkloadRequest,
    input: Option<&[u8]>,
) -> Result<KernelOp, Box<WorkloadResponse>> {
    let invalid = |msg: String| {
        Box::new(WorkloadResponse::err(WireErrorCode::InvalidParams, msg))
    };
    let parse_u64 = |key: &str, default: u64| -> Result<u64, Box<WorkloadResponse>> {
        match request.params.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse::<u64>()
                .map_err(|e| invalid(format!("param {key}: {e}"))),
        }
    };
    let payload_len = |label: &str| -> Result<usize, Box<WorkloadResponse>> {
        input
            .map(<[u8]>::len)
            .ok_or_else(|| invalid(format!("{label} requires a payload")))
    };

    match request.workload {
        WorkloadId::Fibonacci => Ok(KernelOp::Fib {
            n: parse_u64("n", request.group.integer_n())?,
        }),
        WorkloadId::PrimeNumbers => Ok(KernelOp::PrimeCount {
            limit: parse_u64("limit", request.group.integer_n())?,
        }),
        WorkloadId::MandelbrotBitmap => {
            let len = payload_len("mandelbrot-bitmap")?;
            if len < 1 {
                return Err(invalid("mandelbrot payload must be >= 1 byte".into()));
            }
            Ok(KernelOp::Mandelbrot {
                side: (len as f64).sqrt().floor() as u32,
            })
        }
        WorkloadId::AudioGeneration => {
            let len = payload_len("audio-generation")?;
            if len < 44 {
                return Err(invalid("audio payload must be >= 44 bytes".into()));
            }
            Ok(KernelOp::Audio {
                total_len: len as u32,
            })
        }
        WorkloadId::EncryptMessage | WorkloadId::DecryptMessage => {
            let key = request
                .params
                .get("key")
                .map(String::as_str)
                .unwrap_or("lumos-default-key");
            if key.is_empty() {
                return Err(invalid("encryption key must be nonempty".into()));
            }
            Ok(KernelOp::Xcrypt {
                key: key.as_bytes().to_vec(),
            })
        }
        WorkloadId::FuzzySearch => {
            let query = request
                .params
                .get("query")
                .map(String::as_str)
                .unwrap_or("serverless");
            if query.is_empty() {
                return Err(invalid("query must be nonempty".into()));
            }
            if query.len() > MAX_QUERY_BYTES {
                return Err(invalid(format!(
                    "query longer than {MAX_QUERY_BYTES} bytes"
                )));
            }
            Ok(KernelOp::FuzzyCount {
                query: query.as_bytes().to_vec(),
                max_dist: parse_u64("max_dist", 2)? as u32,
            })
        }
        WorkloadId::LanguageDetection => Ok(KernelOp::LangDetect),
    }
}

fn kernel_error(e: KernelError) -> WorkloadResponse {
    let code = match e {
        KernelError::MissingKernel(_) => WireErrorCode::UnknownWorkload,
        _ => WireErrorCode::Internal,
    };
    WorkloadResponse::err(code, e.to_string())
}
