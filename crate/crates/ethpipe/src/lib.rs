//! Ethernet frame processing, from the wire up: bitstream synchronization
//! and the byte-level frame codec, the 802.3 frame check sequence, L2/L3/L4
//! header parsing, a staged decode pipeline, a MAC-learning switch with
//! store-and-forward / cut-through / hybrid operation, an IPv4 router, and
//! a bit-time fabric simulator that binds links to a switch or router.

pub mod bitstream;
pub mod crc32;
pub mod ethernet;
pub mod io;
pub mod ipv4;
pub mod parse;
pub mod pipeline;
pub mod router;
pub mod sim;
pub mod switch;
#[cfg(test)]
pub(crate) mod testdata;
pub mod types;

pub use types::{DropReason, PortId};
