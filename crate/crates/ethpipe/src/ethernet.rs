//! Byte-level Ethernet frame layout and codec.
//!
//! ```text
//!   +---------+---------+-------------+----------------+---------+
//!   | dst MAC | src MAC | length/type |    payload     |   FCS   |
//!   | 6 bytes | 6 bytes | 2 bytes BE  | 46..1500 bytes | 4 bytes |
//!   +---------+---------+-------------+----------------+---------+
//! ```
//!
//! A serialized frame is 64..=1518 bytes. The FCS covers every byte ahead
//! of it and is stored least-significant byte first, which is wire order
//! for a bit-reflected CRC.

use crate::crc32;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub const HEADER_LEN: usize = 14;
pub const FCS_LEN: usize = 4;
pub const MIN_PAYLOAD: usize = 46;
pub const MAX_PAYLOAD: usize = 1500;
pub const MIN_FRAME: usize = HEADER_LEN + MIN_PAYLOAD + FCS_LEN;
pub const MAX_FRAME: usize = HEADER_LEN + MAX_PAYLOAD + FCS_LEN;

/// Ethertype value for IPv4 in the length/type field.
pub const ETHERTYPE_IPV4: u16 = 0x0800;

/// 48-bit MAC address, stored in transmission (byte) order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MacAddr(pub [u8; 6]);

impl MacAddr {
    pub const BROADCAST: MacAddr = MacAddr([0xFF; 6]);

    pub fn is_broadcast(self) -> bool {
        self == Self::BROADCAST
    }

    /// Group bit: least-significant bit of the first octet. Set for every
    /// multicast address, broadcast included.
    pub fn is_multicast(self) -> bool {
        self.0[0] & 0x01 != 0
    }
}

impl fmt::Display for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.0;
        write!(f, "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}", b[0], b[1], b[2], b[3], b[4], b[5])
    }
}

impl fmt::Debug for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid MAC address {0:?}, expected six colon-separated hex octets")]
pub struct MacParseError(String);

impl FromStr for MacAddr {
    type Err = MacParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bytes = [0u8; 6];
        let mut parts = s.split(':');
        for slot in bytes.iter_mut() {
            let part = parts.next().ok_or_else(|| MacParseError(s.to_string()))?;
            if part.len() != 2 {
                return Err(MacParseError(s.to_string()));
            }
            *slot = u8::from_str_radix(part, 16).map_err(|_| MacParseError(s.to_string()))?;
        }
        if parts.next().is_some() {
            return Err(MacParseError(s.to_string()));
        }
        Ok(MacAddr(bytes))
    }
}

/// A decoded frame. `fcs` is the trailing field exactly as stored; whether
/// it matches the contents is [`crate::crc32::fcs_verify`]'s business.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub dst: MacAddr,
    pub src: MacAddr,
    pub length_type: u16,
    pub payload: Vec<u8>,
    pub fcs: u32,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum FrameError {
    #[error("frame of {len} bytes is under the {MIN_FRAME}-byte minimum")]
    FrameTooShort { len: usize },
    #[error("frame of {len} bytes is over the {MAX_FRAME}-byte maximum")]
    FrameTooLong { len: usize },
    #[error("payload of {len} bytes is over the {MAX_PAYLOAD}-byte maximum")]
    PayloadTooLong { len: usize },
    #[error("payload of {len} bytes is under the {MIN_PAYLOAD}-byte minimum and padding is off")]
    PayloadTooShort { len: usize },
}

/// Splits `raw` into frame fields. No FCS verification happens here.
pub fn decode_frame(raw: &[u8]) -> Result<Frame, FrameError> {
    if raw.len() < MIN_FRAME {
        return Err(FrameError::FrameTooShort { len: raw.len() });
    }
    if raw.len() > MAX_FRAME {
        return Err(FrameError::FrameTooLong { len: raw.len() });
    }
    let body_end = raw.len() - FCS_LEN;
    Ok(Frame {
        dst: MacAddr(raw[0..6].try_into().unwrap()),
        src: MacAddr(raw[6..12].try_into().unwrap()),
        length_type: u16::from_be_bytes([raw[12], raw[13]]),
        payload: raw[HEADER_LEN..body_end].to_vec(),
        fcs: u32::from_le_bytes(raw[body_end..].try_into().unwrap()),
    })
}

/// Serializes a frame and appends a freshly computed FCS. With `pad` set,
/// payloads under 46 bytes are zero-filled up to the minimum; without it
/// they are rejected.
pub fn encode_frame(
    dst: MacAddr,
    src: MacAddr,
    length_type: u16,
    payload: &[u8],
    pad: bool,
) -> Result<Vec<u8>, FrameError> {
    if payload.len() > MAX_PAYLOAD {
        return Err(FrameError::PayloadTooLong { len: payload.len() });
    }
    if payload.len() < MIN_PAYLOAD && !pad {
        return Err(FrameError::PayloadTooShort { len: payload.len() });
    }
    let body_len = HEADER_LEN + payload.len().max(MIN_PAYLOAD);
    let mut out = Vec::with_capacity(body_len + FCS_LEN);
    out.extend_from_slice(&dst.0);
    out.extend_from_slice(&src.0);
    out.extend_from_slice(&length_type.to_be_bytes());
    out.extend_from_slice(payload);
    out.resize(body_len, 0);
    let fcs = crc32::crc32_compute(&out);
    out.extend_from_slice(&fcs.to_le_bytes());
    Ok(out)
}
