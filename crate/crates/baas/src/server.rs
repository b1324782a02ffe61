//! Threaded TCP server: one handler thread per connection, per-connection
//! serial processing, shared store behind a lock.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, RwLock};
use std::thread;
use std::time::Duration;

use crate::{
    BaasConfig, BaasError, MAX_KEY_BYTES, OP_CONFIGURE, OP_GET, OP_PUT, STATUS_BAD_REQUEST,
    STATUS_NOT_FOUND, STATUS_OK, STATUS_TOO_LARGE,
};

const THROTTLE_CHUNK: usize = 64 * 1024;

struct Shared {
    store: RwLock<HashMap<String, Arc<Vec<u8>>>>,
    config: RwLock<BaasConfig>,
}

pub struct BaasServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    accept_thread: Option<thread::JoinHandle<()>>,
}

impl BaasServer {
    /// Binds 127.0.0.1 on the given port (0 picks a free one) and serves
    /// until dropped or `stop()`.
    pub fn start(port: u16, config: BaasConfig) -> Result<BaasServer, BaasError> {
        let listener = TcpListener::bind(("127.0.0.1", port))?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let shared = Arc::new(Shared {
            store: RwLock::new(HashMap::new()),
            config: RwLock::new(config),
        });

        let stop_accept = Arc::clone(&stop);
        let accept_thread = thread::spawn(move || {
            for conn in listener.incoming() {
                if stop_accept.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = conn else { continue };
                let shared = Arc::clone(&shared);
                thread::spawn(move || {
                    let _ = handle_connection(stream, &shared);
                });
            }
        });

        Ok(BaasServer {
            addr,
            stop,
            accept_thread: Some(accept_thread),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn port(&self) -> u16 {
        self.addr.port()
    }

    pub fn stop(&mut self) {
        if self.stop.swap(true, Ordering::SeqCst) {
            return;
        }
        // Wake the accept loop.
        let _ = TcpStream::connect(self.addr);
        if let Some(t) = self.accept_thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for BaasServer {
    fn drop(&mut self) {
        self.stop();
    }
}

fn read_u32(stream: &mut TcpStream) -> std::io::Result<u32> {
    let mut buf = [0u8; 4];
    stream.read_exact(&mut buf)?;
    Ok(u32::from_be_bytes(buf))
}

fn handle_connection(mut stream: TcpStream, shared: &Shared) -> std::io::Result<()> {
    loop {
        let mut op = [0u8; 1];
        if stream.read_exact(&mut op).is_err() {
            return Ok(()); // peer closed
        }
        match op[0] {
            OP_GET => handle_get(&mut stream, shared)?,
            OP_PUT => handle_put(&mut stream, shared)?,
            OP_CONFIGURE => handle_configure(&mut stream, shared)?,
            _ => {
                stream.write_all(&[STATUS_BAD_REQUEST])?;
                return Ok(());
            }
        }
    }
}

fn read_key(stream: &mut TcpStream) -> std::io::Result<Option<String>> {
    let key_len = read_u32(stream)? as usize;
    if key_len > MAX_KEY_BYTES {
        return Ok(None);
    }
    let mut key = vec![0u8; key_len];
    stream.read_exact(&mut key)?;
    Ok(String::from_utf8(key).ok())
}

fn inject_latency(config: &BaasConfig) {
    if config.artificial_latency_ms > 0 {
        thread::sleep(Duration::from_millis(config.artificial_latency_ms as u64));
    }
}

/// Sleep long enough that `bytes` moved at most at the configured rate.
fn throttle(config: &BaasConfig, bytes: usize) {
    if config.bandwidth_cap_bytes_per_s > 0 {
        let secs = bytes as f64 / config.bandwidth_cap_bytes_per_s as f64;
        thread::sleep(Duration::from_secs_f64(secs));
    }
}

fn handle_get(stream: &mut TcpStream, shared: &Shared) -> std::io::Result<()> {
    let Some(key) = read_key(stream)? else {
        stream.write_all(&[STATUS_BAD_REQUEST])?;
        return Ok(());
    };
    let config = *shared.config.read().unwrap();
    let value = shared.store.read().unwrap().get(&key).cloned();
    inject_latency(&config);
    match value {
        None => stream.write_all(&[STATUS_NOT_FOUND])?,
        Some(value) => {
            stream.write_all(&[STATUS_OK])?;
            stream.write_all(&(value.len() as u32).to_be_bytes())?;
            for chunk in value.chunks(THROTTLE_CHUNK) {
                throttle(&config, chunk.len());
                stream.write_all(chunk)?;
            }
        }
    }
    stream.flush()
}

fn handle_put(stream: &mut TcpStream, shared: &Shared) -> std::io::Result<()> {
    let key = read_key(stream)?;
    let val_len = read_u32(stream)? as usize;
    let config = *shared.config.read().unwrap();
    if val_len > config.max_value_bytes as usize {
        // Drain the value to keep the stream usable, then reject.
        std::io::copy(
            &mut stream.take(val_len as u64),
            &mut std::io::sink(),
        )?;
        inject_latency(&config);
        stream.write_all(&[STATUS_TOO_LARGE])?;
        return stream.flush();
    }
    let mut value = vec![0u8; val_len];
    stream.read_exact(&mut value)?;
    inject_latency(&config);
    throttle(&config, val_len);
    match key {
        None => stream.write_all(&[STATUS_BAD_REQUEST])?,
        Some(key) => {
            shared.store.write().unwrap().insert(key, Arc::new(value));
            stream.write_all(&[STATUS_OK])?;
        }
    }
    stream.flush()
}

fn handle_configure(stream: &mut TcpStream, shared: &Shared) -> std::io::Result<()> {
    let latency = read_u32(stream)?;
    let cap = read_u32(stream)?;
    let max_value = read_u32(stream)?;
    if max_value == 0 {
        stream.write_all(&[STATUS_BAD_REQUEST])?;
        return stream.flush();
    }
    *shared.config.write().unwrap() = BaasConfig {
        artificial_latency_ms: latency,
        bandwidth_cap_bytes_per_s: cap,
        max_value_bytes: max_value,
    };
    stream.write_all(&[STATUS_OK])?;
    stream.flush()
}
