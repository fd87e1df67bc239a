//! Link-level simulator for interference alignment in a three-user 2×2
//! MIMO-OFDM WLAN network.

pub mod numerics;
pub mod channel;
pub mod metrics;
pub mod phy;
pub mod align;
pub mod experiment;
pub mod cli;
