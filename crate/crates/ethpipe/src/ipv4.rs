//! IPv4 header parsing and the one's-complement header checksum, plus the
//! incremental checksum update for a TTL decrement.

use std::net::Ipv4Addr;
use thiserror::Error;

pub const MIN_HEADER_LEN: usize = 20;
pub const MAX_HEADER_LEN: usize = 60;

pub const PROTO_TCP: u8 = 6;
pub const PROTO_UDP: u8 = 17;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ipv4Header {
    pub version: u8,
    pub ihl: u8,
    pub dscp_ecn: u8,
    pub total_length: u16,
    pub identification: u16,
    pub flags_frag: u16,
    pub ttl: u8,
    pub protocol: u8,
    pub header_checksum: u16,
    pub src: Ipv4Addr,
    pub dst: Ipv4Addr,
    pub options: Vec<u8>,
    /// Whether the stored checksum matched at parse time.
    pub checksum_valid: bool,
}

impl Ipv4Header {
    pub fn header_len(&self) -> usize {
        self.ihl as usize * 4
    }

    pub fn frag_offset(&self) -> u16 {
        self.flags_frag & 0x1FFF
    }

    pub fn more_fragments(&self) -> bool {
        self.flags_frag & 0x2000 != 0
    }

    pub fn is_fragment(&self) -> bool {
        self.frag_offset() != 0 || self.more_fragments()
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum Ipv4Error {
    #[error("{len} bytes is too short for an IPv4 header")]
    TooShort { len: usize },
    #[error("version {version} is not IPv4")]
    BadVersion { version: u8 },
    #[error("IHL {ihl} outside 5..=15 or past the end of the data")]
    BadIhl { ihl: u8 },
    #[error("total length {total_length} is inconsistent with the header")]
    BadTotalLength { total_length: u16 },
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ChecksumError {
    #[error("header of {len} bytes is not an even length in 20..=60")]
    BadLength { len: usize },
    #[error("TTL is already zero")]
    TtlAlreadyZero,
}

/// Parses an IPv4 header from the front of `data`. Trailing bytes beyond
/// `total_length` are fine (Ethernet pads short payloads); a `total_length`
/// reaching past `data` is not.
pub fn parse_ipv4(data: &[u8]) -> Result<Ipv4Header, Ipv4Error> {
    if data.len() < MIN_HEADER_LEN {
        return Err(Ipv4Error::TooShort { len: data.len() });
    }
    let version = data[0] >> 4;
    if version != 4 {
        return Err(Ipv4Error::BadVersion { version });
    }
    let ihl = data[0] & 0x0F;
    let header_len = ihl as usize * 4;
    if ihl < 5 || header_len > data.len() {
        return Err(Ipv4Error::BadIhl { ihl });
    }
    let total_length = u16::from_be_bytes([data[2], data[3]]);
    if (total_length as usize) < header_len || total_length as usize > data.len() {
        return Err(Ipv4Error::BadTotalLength { total_length });
    }
    let checksum_valid = ones_complement_sum(&data[..header_len]) == 0xFFFF;
    Ok(Ipv4Header {
        version,
        ihl,
        dscp_ecn: data[1],
        total_length,
        identification: u16::from_be_bytes([data[4], data[5]]),
        flags_frag: u16::from_be_bytes([data[6], data[7]]),
        ttl: data[8],
        protocol: data[9],
        header_checksum: u16::from_be_bytes([data[10], data[11]]),
        src: Ipv4Addr::new(data[12], data[13], data[14], data[15]),
        dst: Ipv4Addr::new(data[16], data[17], data[18], data[19]),
        options: data[MIN_HEADER_LEN..header_len].to_vec(),
        checksum_valid,
    })
}

/// 16-bit one's-complement sum of big-endian words, carries folded back in.
fn ones_complement_sum(bytes: &[u8]) -> u16 {
    let mut sum: u32 = 0;
    for pair in bytes.chunks(2) {
        let word = if pair.len() == 2 {
            u16::from_be_bytes([pair[0], pair[1]])
        } else {
            u16::from_be_bytes([pair[0], 0])
        };
        sum += word as u32;
    }
    while sum > 0xFFFF {
        sum = (sum & 0xFFFF) + (sum >> 16);
    }
    sum as u16
}

/// Computes the header checksum over `header`, whose checksum field must
/// be zeroed. A header carrying the returned value sums to 0xFFFF.
pub fn ipv4_checksum(header: &[u8]) -> Result<u16, ChecksumError> {
    if header.len() < MIN_HEADER_LEN || header.len() > MAX_HEADER_LEN || header.len() % 2 != 0 {
        return Err(ChecksumError::BadLength { len: header.len() });
    }
    Ok(!ones_complement_sum(header))
}

/// Incremental checksum update for a TTL decrement: with the old checksum
/// and old TTL, returns the checksum the header carries after TTL drops by
/// one and nothing else changes. Equals a full recompute.
pub fn ipv4_checksum_decrement_ttl(checksum: u16, ttl: u8) -> Result<u16, ChecksumError> {
    if ttl == 0 {
        return Err(ChecksumError::TtlAlreadyZero);
    }
    // HC' = ~(~HC + ~m + m') with m the TTL-carrying word; the protocol
    // byte in that word cancels out of the sum, so only the high byte acts.
    let old_word = (ttl as u16) << 8;
    let new_word = ((ttl - 1) as u16) << 8;
    let mut sum = (!checksum as u32) + (!old_word as u32) + (new_word as u32);
    while sum > 0xFFFF {
        sum = (sum & 0xFFFF) + (sum >> 16);
    }
    Ok(!(sum as u16))
}
