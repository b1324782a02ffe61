//! Bytecode workload instance and precompiler.
//!
//! `lumos-engine serve --engine <interpreted|aot> --module <m.wasm>
//!     [--precompiled <m.cwasm>]`
//! serves framed requests over the transport named by LUMOS_TRANSPORT
//! (`stdio` or `socket:<port>`, default stdio).
//!
//! `lumos-engine precompile --module <m.wasm> --out <m.cwasm>`
//! compiles bytecode to the native serialized form used by aot serving.

use std::path::PathBuf;
use std::process::ExitCode;

use lumos_workloads::provider::KernelProvider;
use lumos_workloads::server::{serve, Transport};

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(UsageError(msg)) => {
            eprintln!("lumos-engine: {msg}");
            ExitCode::from(2)
        }
    }
}

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

struct Flags {
    engine: Option<String>,
    module: Option<PathBuf>,
    precompiled: Option<PathBuf>,
    out: Option<PathBuf>,
}

fn parse_flags(args: &[String]) -> Result<Flags, UsageError> {
    let mut flags = Flags {
        engine: None,
        module: None,
        precompiled: None,
        out: None,
    };
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let value = it
            .next()
            .ok_or_else(|| UsageError(format!("{flag} needs a value")))?;
        match flag.as_str() {
            "--engine" => flags.engine = Some(value.clone()),
            "--module" => flags.module = Some(PathBuf::from(value)),
            "--precompiled" => flags.precompiled = Some(PathBuf::from(value)),
            "--out" => flags.out = Some(PathBuf::from(value)),
            other => return Err(UsageError(format!("unknown flag {other}"))),
        }
    }
    Ok(flags)
}

fn run() -> Result<(), UsageError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (command, rest) = args
        .split_first()
        .ok_or_else(|| UsageError("expected a subcommand: serve | precompile".into()))?;
    let flags = parse_flags(rest)?;
    match command.as_str() {
        "serve" => serve_command(flags),
        "precompile" => precompile_command(flags),
        other => Err(UsageError(format!("unknown subcommand {other}"))),
    }
}

fn serve_command(flags: Flags) -> Result<(), UsageError> {
    let engine = flags
        .engine
        .ok_or_else(|| UsageError("serve requires --engine".into()))?;
    let transport = match std::env::var("LUMOS_TRANSPORT") {
        Ok(raw) => raw.parse::<Transport>()?,
        Err(_) => Transport::Stdio,
    };
    let mut provider: Box<dyn KernelProvider> = match engine.as_str() {
        "interpreted" => {
            let module = flags
                .module
                .ok_or_else(|| UsageError("interpreted serving requires --module".into()))?;
            let bytes = std::fs::read(&module)?;
            Box::new(lumos_engine_host::load_interpreted(&bytes)?)
        }
        "aot" => {
            let precompiled = flags
                .precompiled
                .ok_or_else(|| UsageError("aot serving requires --precompiled".into()))?;
            Box::new(lumos_engine_host::load_precompiled(&precompiled)?)
        }
        other => return Err(UsageError(format!("unknown engine {other}"))),
    };
    let instance_id = format!("{engine}-{}", std::process::id());
    serve(transport, provider.as_mut(), &instance_id)?;
    Ok(())
}

fn precompile_command(flags: Flags) -> Result<(), UsageError> {
    let module = flags
        .module
        .ok_or_else(|| UsageError("precompile requires --module".into()))?;
    let out = flags
        .out
        .ok_or_else(|| UsageError("precompile requires --out".into()))?;
    let bytes = std::fs::read(&module)?;
    let compiled = lumos_engine_host::precompile(&bytes)?;
    std::fs::write(&out, compiled)?;
    Ok(())
}
