//! 802.11a-style OFDM modem.
//!
//! The transmit side scrambles, encodes, interleaves and maps a 1250-byte
//! payload, then builds a precoded two-antenna frame (STS, LTS, SIGNAL
//! placeholder, data symbols). The receive side detects and synchronizes,
//! estimates the equivalent channel from the LTS, zero-forces and decodes
//! with a hard-decision Viterbi decoder.

use thiserror::Error;

pub mod coding;
pub mod frame;
pub mod mapping;
pub mod ofdm;
pub mod rates;
pub mod receiver;
pub mod sync;

pub use frame::{assemble_data_frame, assemble_training_frame, decode_payload, encode_payload, PhyFrame};
pub use rates::{RateParams, RATES_MBPS, RATE_TABLE};
pub use receiver::{ls_estimate, receive_frame, zf_equalize, Combiner, RxConfig, RxFrame};
pub use sync::{detect_and_sync, SyncConfig, SyncResult};

/// Payload length in bits (1250 bytes).
pub const PAYLOAD_BITS: usize = 10_000;
/// Zero SERVICE bits prepended before scrambling.
pub const SERVICE_BITS: usize = 16;
/// Zero tail bits flushing the encoder.
pub const TAIL_BITS: usize = 6;
/// Default scrambler initial state.
pub const DEFAULT_SCRAMBLER_SEED: u8 = 0x5d;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhyError {
    #[error("bad length: expected {expected}, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("expected {expected} precoders, got {got}")]
    MissingPrecoder { expected: usize, got: usize },
    #[error("equivalent channel is singular")]
    SingularChannel,
}
