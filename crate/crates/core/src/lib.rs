//! Shared domain types and wire protocol for the Lumos benchmark harness.

pub mod clock;
pub mod digest;
pub mod frame;
pub mod rng;
pub mod types;

pub use clock::Clock;
pub use digest::fnv1a64;
pub use frame::{read_frame, write_frame, FrameError, MAX_FRAME_BYTES};
pub use rng::SplitMix64;
pub use types::*;
