//! Blocking client; one TCP connection per client, reconnect on demand.

use std::io::{Read, Write};
use std::net::TcpStream;
use std::time::Duration;

use crate::{
    BaasConfig, BaasError, OP_CONFIGURE, OP_GET, OP_PUT, STATUS_NOT_FOUND, STATUS_OK,
    STATUS_TOO_LARGE,
};

pub struct BaasClient {
    host: String,
    port: u16,
    conn: Option<TcpStream>,
    timeout: Duration,
}

impl BaasClient {
    pub fn new(host: &str, port: u16) -> Self {
        BaasClient {
            host: host.to_string(),
            port,
            conn: None,
            timeout: Duration::from_secs(120),
        }
    }

    fn stream(&mut self) -> Result<&mut TcpStream, BaasError> {
        if self.conn.is_none() {
            let stream = TcpStream::connect((self.host.as_str(), self.port))?;
            stream.set_read_timeout(Some(self.timeout))?;
            stream.set_nodelay(true)?;
            self.conn = Some(stream);
        }
        Ok(self.conn.as_mut().unwrap())
    }

    /// Runs `f` against the connection, dropping it on error so the next
    /// call reconnects.
    fn with_stream<T>(
        &mut self,
        f: impl FnOnce(&mut TcpStream) -> Result<T, BaasError>,
    ) -> Result<T, BaasError> {
        let result = f(self.stream()?);
        if result.is_err() {
            self.conn = None;
        }
        result
    }

    pub fn get(&mut self, key: &str) -> Result<Vec<u8>, BaasError> {
        let key = key.as_bytes().to_vec();
        self.with_stream(|s| {
            s.write_all(&[OP_GET])?;
            s.write_all(&(key.len() as u32).to_be_bytes())?;
            s.write_all(&key)?;
            s.flush()?;
            match read_status(s)? {
                STATUS_OK => {
                    let len = read_u32(s)? as usize;
                    let mut value = vec![0u8; len];
                    s.read_exact(&mut value)?;
                    Ok(value)
                }
                STATUS_NOT_FOUND => Err(BaasError::NotFound),
                other => Err(BaasError::Protocol(format!("get status {other}"))),
            }
        })
    }

    pub fn put(&mut self, key: &str, value: &[u8]) -> Result<(), BaasError> {
        let key = key.as_bytes().to_vec();
        let value = value.to_vec();
        self.with_stream(|s| {
            s.write_all(&[OP_PUT])?;
            s.write_all(&(key.len() as u32).to_be_bytes())?;
            s.write_all(&key)?;
            s.write_all(&(value.len() as u32).to_be_bytes())?;
            s.write_all(&value)?;
            s.flush()?;
            match read_status(s)? {
                STATUS_OK => Ok(()),
                STATUS_TOO_LARGE => Err(BaasError::ValueTooLarge),
                other => Err(BaasError::Protocol(format!("put status {other}"))),
            }
        })
    }

    pub fn configure(&mut self, config: BaasConfig) -> Result<(), BaasError> {
        if config.max_value_bytes == 0 {
            return Err(BaasError::InvalidConfig("max value bytes must be > 0".into()));
        }
        self.with_stream(|s| {
            s.write_all(&[OP_CONFIGURE])?;
            s.write_all(&config.artificial_latency_ms.to_be_bytes())?;
            s.write_all(&config.bandwidth_cap_bytes_per_s.to_be_bytes())?;
            s.write_all(&config.max_value_bytes.to_be_bytes())?;
            s.flush()?;
            match read_status(s)? {
                STATUS_OK => Ok(()),
                other => Err(BaasError::Protocol(format!("configure status {other}"))),
            }
        })
    }
}

fn read_status(s: &mut TcpStream) -> Result<u8, BaasError> {
    let mut buf = [0u8; 1];
    s.read_exact(&mut buf)?;
    Ok(buf[0])
}

fn read_u32(s: &mut TcpStream) -> Result<u32, BaasError> {
    let mut buf = [0u8; 4];
    s.read_exact(&mut buf)?;
    Ok(u32::from_be_bytes(buf))
}
