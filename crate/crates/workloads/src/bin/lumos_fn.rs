//! Native workload instance. Speaks the framed protocol over the transport
//! named by LUMOS_TRANSPORT (`stdio` or `socket:<port>`, default stdio).

use std::process::ExitCode;

use lumos_workloads::provider::NativeKernels;
use lumos_workloads::server::{serve, Transport};

fn main() -> ExitCode {
    let transport = match std::env::var("LUMOS_TRANSPORT") {
        Ok(raw) => match raw.parse::<Transport>() {
            Ok(t) => t,
            Err(e) => {
                eprintln!("lumos-fn: {e}");
                return ExitCode::from(2);
            }
        },
        Err(_) => Transport::Stdio,
    };
    let instance_id = format!("native-{}", std::process::id());
    let mut provider = NativeKernels::new();
    match serve(transport, &mut provider, &instance_id) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lumos-fn: {e}");
            ExitCode::FAILURE
        }
    }
}
