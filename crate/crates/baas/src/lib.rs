//! A loopback key-value service standing in for a BaaS store, with
//! injectable per-operation latency and a bandwidth cap so I/O cost is a
//! controllable experiment factor.
//!
//! Wire protocol (all integers 4-byte big-endian): one op byte
//! (0 = get, 1 = put, 2 = configure), then key length + key bytes, then for
//! put a value length + value bytes, and for configure three u32 fields
//! (latency ms, bandwidth cap bytes/s, max value bytes). Responses start
//! with a status byte (0 = ok, 1 = not-found, 2 = value-too-large,
//! 3 = bad-request); a successful get is followed by value length + bytes.

mod client;
mod server;

pub use client::BaasClient;
pub use server::BaasServer;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const OP_GET: u8 = 0;
pub const OP_PUT: u8 = 1;
pub const OP_CONFIGURE: u8 = 2;

pub const STATUS_OK: u8 = 0;
pub const STATUS_NOT_FOUND: u8 = 1;
pub const STATUS_TOO_LARGE: u8 = 2;
pub const STATUS_BAD_REQUEST: u8 = 3;

pub const MAX_KEY_BYTES: usize = 256;

/// Service configuration. `bandwidth_cap_bytes_per_s` of 0 means unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaasConfig {
    pub artificial_latency_ms: u32,
    pub bandwidth_cap_bytes_per_s: u32,
    pub max_value_bytes: u32,
}

impl Default for BaasConfig {
    fn default() -> Self {
        BaasConfig {
            artificial_latency_ms: 0,
            bandwidth_cap_bytes_per_s: 0,
            max_value_bytes: 16 * 1024 * 1024,
        }
    }
}

/// Unvalidated settings as they appear in config files; rejects negatives
/// and a zero value-size bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaasSettings {
    #[serde(default)]
    pub artificial_latency_ms: i64,
    #[serde(default)]
    pub bandwidth_cap_bytes_per_s: i64,
    #[serde(default = "default_max_value")]
    pub max_value_bytes: i64,
}

fn default_max_value() -> i64 {
    16 * 1024 * 1024
}

impl Default for BaasSettings {
    fn default() -> Self {
        BaasSettings {
            artificial_latency_ms: 0,
            bandwidth_cap_bytes_per_s: 0,
            max_value_bytes: default_max_value(),
        }
    }
}

impl BaasSettings {
    pub fn validate(&self) -> Result<BaasConfig, BaasError> {
        if self.artificial_latency_ms < 0 {
            return Err(BaasError::InvalidConfig("latency must be >= 0".into()));
        }
        if self.bandwidth_cap_bytes_per_s < 0 {
            return Err(BaasError::InvalidConfig("bandwidth cap must be >= 0".into()));
        }
        if self.max_value_bytes <= 0 {
            return Err(BaasError::InvalidConfig("max value bytes must be > 0".into()));
        }
        Ok(BaasConfig {
            artificial_latency_ms: self.artificial_latency_ms.min(u32::MAX as i64) as u32,
            bandwidth_cap_bytes_per_s: self.bandwidth_cap_bytes_per_s.min(u32::MAX as i64) as u32,
            max_value_bytes: self.max_value_bytes.min(u32::MAX as i64) as u32,
        })
    }
}

#[derive(Debug, Error)]
pub enum BaasError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("key not found")]
    NotFound,
    #[error("value too large")]
    ValueTooLarge,
    #[error("bad request")]
    BadRequest,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("protocol error: {0}")]
    Protocol(String),
}
