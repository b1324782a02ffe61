//! Request handling behaviour: output digests, phase probe population,
//! error codes, storage fetch/store, and the framed stdio protocol against
//! the real instance binary.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, Command, Stdio};

use lumos_baas::{BaasClient, BaasConfig, BaasServer};
use lumos_core::{
    fnv1a64, read_frame, write_frame, PayloadGroup, SplitMix64, StorageRef, WireErrorCode,
    WorkloadId, WorkloadRequest, WorkloadResponse,
};
use lumos_workloads::provider::NativeKernels;
use lumos_workloads::server::handle_request;
use lumos_workloads::{generate_payload, GeneratedPayload};

fn run(request: &WorkloadRequest) -> WorkloadResponse {
    let mut provider = NativeKernels::new();
    handle_request(request, &mut provider)
}

fn hex_digest(bytes: &[u8]) -> String {
    format!("{:016x}", fnv1a64(bytes))
}

#[test]
fn fibonacci_uses_group_n_by_default() {
    let resp = run(&WorkloadRequest::new(
        WorkloadId::Fibonacci,
        PayloadGroup::G1,
    ));
    assert!(resp.is_ok(), "{:?}", resp.error);
    // F(10000) mod 2^64 rendered in decimal.
    let mut a = 0u64;
    let mut b = 1u64;
    for _ in 0..10_000 {
        let next = a.wrapping_add(b);
        a = b;
        b = next;
    }
    let expect = a.to_string();
    assert_eq!(resp.output_len, expect.len() as u64);
    assert_eq!(resp.output_digest, hex_digest(expect.as_bytes()));
}

#[test]
fn fibonacci_honours_explicit_n() {
    let resp = run(
        &WorkloadRequest::new(WorkloadId::Fibonacci, PayloadGroup::G1).with_param("n", "10"),
    );
    assert_eq!(resp.output_digest, hex_digest(b"55"));
}

#[test]
fn prime_numbers_group_one() {
    let resp = run(&WorkloadRequest::new(
        WorkloadId::PrimeNumbers,
        PayloadGroup::G1,
    ));
    assert_eq!(resp.output_digest, hex_digest(b"1229"));
}

#[test]
fn mandelbrot_output_is_side_squared() {
    let payload = match generate_payload(WorkloadId::MandelbrotBitmap, PayloadGroup::G1, 1) {
        GeneratedPayload::Bytes(b) => b,
        other => panic!("unexpected payload {other:?}"),
    };
    let resp = run(
        &WorkloadRequest::new(WorkloadId::MandelbrotBitmap, PayloadGroup::G1)
            .with_inline_payload(&payload),
    );
    assert!(resp.is_ok(), "{:?}", resp.error);
    let side = (payload.len() as f64).sqrt().floor() as u64;
    assert_eq!(resp.output_len, side * side);
}

#[test]
fn audio_output_len_equals_payload_len() {
    let payload = vec![0u8; 524_288];
    let resp = run(
        &WorkloadRequest::new(WorkloadId::AudioGeneration, PayloadGroup::G1)
            .with_inline_payload(&payload),
    );
    assert!(resp.is_ok());
    assert_eq!(resp.output_len, 524_288);
}

#[test]
fn encrypt_then_decrypt_restores_the_payload_digest() {
    let mut payload = vec![0u8; 4096];
    SplitMix64::new(42).fill(&mut payload);
    let original_digest = hex_digest(&payload);

    let enc = run(
        &WorkloadRequest::new(WorkloadId::EncryptMessage, PayloadGroup::G1)
            .with_inline_payload(&payload),
    );
    assert!(enc.is_ok());
    assert_ne!(enc.output_digest, original_digest.clone());

    // Re-encrypting the ciphertext with the same key is decryption; feed the
    // ciphertext back through the decrypt workload.
    let mut cipher = payload.clone();
    lumos_workloads::kernels::xcrypt_in_place(b"lumos-default-key", &mut cipher);
    assert_eq!(enc.output_digest, hex_digest(&cipher));

    let dec = run(
        &WorkloadRequest::new(WorkloadId::DecryptMessage, PayloadGroup::G1)
            .with_inline_payload(&cipher),
    );
    assert_eq!(dec.output_digest, original_digest);
}

#[test]
fn fuzzy_search_counts_near_matches() {
    let corpus = b"serverless servers serverlost running";
    let resp = run(
        &WorkloadRequest::new(WorkloadId::FuzzySearch, PayloadGroup::G1)
            .with_inline_payload(corpus)
            .with_param("query", "serverless")
            .with_param("max_dist", "2"),
    );
    // serverless (0), servers (3 > 2), serverlost (2)
    assert_eq!(resp.output_digest, hex_digest(b"2"));
}

#[test]
fn language_detection_returns_a_tag() {
    let resp = run(
        &WorkloadRequest::new(WorkloadId::LanguageDetection, PayloadGroup::G1)
            .with_inline_payload(b"the house and the garden were quiet in the evening light"),
    );
    assert_eq!(resp.output_digest, hex_digest(b"en"));
}

#[test]
fn phases_cover_the_request_path() {
    let payload = vec![7u8; 524_288];
    let resp = run(
        &WorkloadRequest::new(WorkloadId::EncryptMessage, PayloadGroup::G1)
            .with_inline_payload(&payload),
    );
    assert!(resp.is_ok());
    assert!(resp.phases.deserialize_ns > 0);
    assert!(resp.phases.compute_ns > 0);
    assert!(resp.phases.serialize_ns > 0);
    assert_eq!(resp.phases.io_fetch_ns, 0);
    assert_eq!(resp.phases.io_store_ns, 0);
}

#[test]
fn error_codes_for_bad_requests() {
    let missing = run(&WorkloadRequest::new(
        WorkloadId::EncryptMessage,
        PayloadGroup::G1,
    ));
    assert_eq!(
        missing.error.as_ref().map(|e| e.code),
        Some(WireErrorCode::InvalidParams)
    );

    let bad_b64 = {
        let mut r = WorkloadRequest::new(WorkloadId::EncryptMessage, PayloadGroup::G1);
        r.payload_b64 = Some("!!not-base64!!".into());
        run(&r)
    };
    assert_eq!(
        bad_b64.error.as_ref().map(|e| e.code),
        Some(WireErrorCode::InvalidParams)
    );

    let bad_n = run(
        &WorkloadRequest::new(WorkloadId::Fibonacci, PayloadGroup::G1).with_param("n", "-3"),
    );
    assert_eq!(
        bad_n.error.as_ref().map(|e| e.code),
        Some(WireErrorCode::InvalidParams)
    );

    let tiny = run(
        &WorkloadRequest::new(WorkloadId::LanguageDetection, PayloadGroup::G1)
            .with_inline_payload(b"ab"),
    );
    assert_eq!(
        tiny.error.as_ref().map(|e| e.code),
        Some(WireErrorCode::InsufficientInput)
    );
}

#[test]
fn storage_fetch_and_store_roundtrip() {
    let server = BaasServer::start(0, BaasConfig::default()).unwrap();
    let mut client = BaasClient::new("127.0.0.1", server.port());

    let mut payload = vec![0u8; 2048];
    SplitMix64::new(5).fill(&mut payload);
    client.put("in-key", &payload).unwrap();

    let mut request =
        WorkloadRequest::new(WorkloadId::EncryptMessage, PayloadGroup::G1).with_param(
            "store_key",
            "out-key",
        );
    request.storage = Some(StorageRef {
        host: "127.0.0.1".into(),
        port: server.port(),
        key: "in-key".into(),
    });
    let resp = run(&request);
    assert!(resp.is_ok(), "{:?}", resp.error);
    assert!(resp.phases.io_fetch_ns > 0);
    assert!(resp.phases.io_store_ns > 0);

    let stored = client.get("out-key").unwrap();
    assert_eq!(resp.output_digest, hex_digest(&stored));
    let mut expect = payload;
    lumos_workloads::kernels::xcrypt_in_place(b"lumos-default-key", &mut expect);
    assert_eq!(stored, expect);
}

#[test]
fn storage_fetch_of_missing_key_is_a_storage_error() {
    let server = BaasServer::start(0, BaasConfig::default()).unwrap();
    let mut request = WorkloadRequest::new(WorkloadId::EncryptMessage, PayloadGroup::G1);
    request.storage = Some(StorageRef {
        host: "127.0.0.1".into(),
        port: server.port(),
        key: "nope".into(),
    });
    let resp = run(&request);
    assert_eq!(
        resp.error.as_ref().map(|e| e.code),
        Some(WireErrorCode::StorageError)
    );
}

struct Instance {
    child: Child,
    stdin: Option<std::process::ChildStdin>,
    stdout: BufReader<std::process::ChildStdout>,
}

impl Instance {
    fn spawn() -> Instance {
        let mut child = Command::new(env!("CARGO_BIN_EXE_lumos-fn"))
            .env("LUMOS_TRANSPORT", "stdio")
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        let stdin = child.stdin.take().unwrap();
        let mut stdout = BufReader::new(child.stdout.take().unwrap());
        let mut ready = String::new();
        stdout.read_line(&mut ready).unwrap();
        assert!(ready.starts_with("READY "), "got {ready:?}");
        Instance {
            child,
            stdin: Some(stdin),
            stdout,
        }
    }

    fn stdin(&mut self) -> &mut std::process::ChildStdin {
        self.stdin.as_mut().unwrap()
    }

    fn call(&mut self, request: &WorkloadRequest) -> WorkloadResponse {
        write_frame(self.stdin(), request).unwrap();
        self.stdin().flush().unwrap();
        read_frame(&mut self.stdout).unwrap()
    }
}

impl Drop for Instance {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[test]
fn instance_binary_serves_framed_requests_over_stdio() {
    let mut instance = Instance::spawn();
    for _ in 0..3 {
        let resp = instance.call(
            &WorkloadRequest::new(WorkloadId::Fibonacci, PayloadGroup::G1).with_param("n", "10"),
        );
        assert_eq!(resp.output_digest, hex_digest(b"55"));
    }
}

#[test]
fn instance_binary_survives_a_malformed_frame() {
    let mut instance = Instance::spawn();

    // A frame whose body is not valid JSON.
    let junk = b"this is not json";
    instance
        .stdin()
        .write_all(&(junk.len() as u32).to_be_bytes())
        .unwrap();
    instance.stdin().write_all(junk).unwrap();
    instance.stdin().flush().unwrap();
    let resp: WorkloadResponse = read_frame(&mut instance.stdout).unwrap();
    assert_eq!(
        resp.error.as_ref().map(|e| e.code),
        Some(WireErrorCode::MalformedFrame)
    );

    // The stream is still usable afterwards.
    let resp = instance.call(
        &WorkloadRequest::new(WorkloadId::PrimeNumbers, PayloadGroup::G1).with_param("limit", "10"),
    );
    assert_eq!(resp.output_digest, hex_digest(b"4"));
}

#[test]
fn instance_binary_exits_cleanly_on_eof() {
    let mut instance = Instance::spawn();
    let resp = instance.call(
        &WorkloadRequest::new(WorkloadId::Fibonacci, PayloadGroup::G1).with_param("n", "1"),
    );
    assert!(resp.is_ok());
    drop(instance.stdin.take()); // EOF signals shutdown
    let status = instance.child.wait().unwrap();
    assert!(status.success());
}

#[test]
fn instance_binary_serves_over_a_socket() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lumos-fn"))
        .env("LUMOS_TRANSPORT", "socket:0")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdout = BufReader::new(child.stdout.take().unwrap());
    let mut ready = String::new();
    stdout.read_line(&mut ready).unwrap();
    // `READY <instance-id> PORT <port>` with the ephemeral port resolved.
    let mut parts = ready.split_whitespace();
    assert_eq!(parts.next(), Some("READY"));
    let _instance_id = parts.next().unwrap();
    assert_eq!(parts.next(), Some("PORT"));
    let port: u16 = parts.next().unwrap().parse().unwrap();
    assert_ne!(port, 0);

    let mut stream = std::net::TcpStream::connect(("127.0.0.1", port)).unwrap();
    for _ in 0..2 {
        let request =
            WorkloadRequest::new(WorkloadId::Fibonacci, PayloadGroup::G1).with_param("n", "10");
        write_frame(&mut stream, &request).unwrap();
        let resp: WorkloadResponse = read_frame(&mut stream).unwrap();
        assert_eq!(resp.output_digest, hex_digest(b"55"));
    }
    drop(stream); // EOF on the socket shuts the instance down
    let status = child.wait().unwrap();
    assert!(status.success());
}
