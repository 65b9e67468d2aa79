//! Classic microsecond pcap capture files.
//!
//! Only the original format is handled: a 24-byte global header whose
//! magic 0xA1B2C3D4 declares the byte order, then one 16-byte header per
//! record. The link type must be 1 (Ethernet). Captures taken from real
//! interfaces normally omit the frame check sequence, so tools decoding
//! captured frames recompute it rather than verify unless told the FCS
//! is present.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

pub const PCAP_MAGIC: u32 = 0xA1B2_C3D4;
pub const LINKTYPE_ETHERNET: u32 = 1;
pub const GLOBAL_HEADER_LEN: usize = 24;
pub const RECORD_HEADER_LEN: usize = 16;
const VERSION_MAJOR: u16 = 2;
const VERSION_MINOR: u16 = 4;
const SNAPLEN: u32 = 65_535;

/// One captured frame with its arrival timestamp. `orig_len` exceeds the
/// stored bytes when the capture was snapped short.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptureRecord {
    pub ts_sec: u32,
    pub ts_usec: u32,
    pub orig_len: u32,
    pub frame: Vec<u8>,
}

impl CaptureRecord {
    pub fn new(ts_sec: u32, ts_usec: u32, frame: Vec<u8>) -> Self {
        let orig_len = frame.len() as u32;
        CaptureRecord { ts_sec, ts_usec, orig_len, frame }
    }

    pub fn is_snapped(&self) -> bool {
        (self.frame.len() as u32) < self.orig_len
    }
}

#[derive(Debug, Error)]
pub enum PcapError {
    #[error("magic 0x{0:08x} is not a microsecond pcap header in either byte order")]
    BadMagic(u32),
    #[error("link type {0} is not Ethernet")]
    UnsupportedLinkType(u32),
    #[error("capture ends {needed} bytes short inside record {index}")]
    TruncatedRecord { index: usize, needed: usize },
    #[error("record {index} claims {captured} captured bytes of a {original}-byte original")]
    BadRecordLength { index: usize, captured: u32, original: u32 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy)]
enum Order {
    Little,
    Big,
}

fn u32_at(bytes: &[u8], at: usize, order: Order) -> u32 {
    let raw: [u8; 4] = bytes[at..at + 4].try_into().unwrap();
    match order {
        Order::Little => u32::from_le_bytes(raw),
        Order::Big => u32::from_be_bytes(raw),
    }
}

/// Decodes an in-memory capture. Byte order comes from the magic; the
/// version field is not checked because classic readers accept any.
pub fn parse_capture(bytes: &[u8]) -> Result<Vec<CaptureRecord>, PcapError> {
    if bytes.len() < GLOBAL_HEADER_LEN {
        return Err(PcapError::TruncatedRecord { index: 0, needed: GLOBAL_HEADER_LEN - bytes.len() });
    }
    let order = if u32_at(bytes, 0, Order::Little) == PCAP_MAGIC {
        Order::Little
    } else if u32_at(bytes, 0, Order::Big) == PCAP_MAGIC {
        Order::Big
    } else {
        return Err(PcapError::BadMagic(u32_at(bytes, 0, Order::Little)));
    };
    let network = u32_at(bytes, 20, order);
    if network != LINKTYPE_ETHERNET {
        return Err(PcapError::UnsupportedLinkType(network));
    }

    let mut records = Vec::new();
    let mut at = GLOBAL_HEADER_LEN;
    while at < bytes.len() {
        let index = records.len();
        let left = bytes.len() - at;
        if left < RECORD_HEADER_LEN {
            return Err(PcapError::TruncatedRecord { index, needed: RECORD_HEADER_LEN - left });
        }
        let ts_sec = u32_at(bytes, at, order);
        let ts_usec = u32_at(bytes, at + 4, order);
        let incl_len = u32_at(bytes, at + 8, order);
        let orig_len = u32_at(bytes, at + 12, order);
        if incl_len > orig_len {
            return Err(PcapError::BadRecordLength { index, captured: incl_len, original: orig_len });
        }
        at += RECORD_HEADER_LEN;
        let body = incl_len as usize;
        if bytes.len() - at < body {
            return Err(PcapError::TruncatedRecord { index, needed: body - (bytes.len() - at) });
        }
        records.push(CaptureRecord {
            ts_sec,
            ts_usec,
            orig_len,
            frame: bytes[at..at + body].to_vec(),
        });
        at += body;
    }
    Ok(records)
}

/// Encodes records in the machine's native byte order, version 2.4,
/// link type Ethernet. An empty list yields the 24-byte header alone.
pub fn encode_capture(records: &[CaptureRecord]) -> Vec<u8> {
    let body: usize = records.iter().map(|r| RECORD_HEADER_LEN + r.frame.len()).sum();
    let mut out = Vec::with_capacity(GLOBAL_HEADER_LEN + body);
    out.extend_from_slice(&PCAP_MAGIC.to_ne_bytes());
    out.extend_from_slice(&VERSION_MAJOR.to_ne_bytes());
    out.extend_from_slice(&VERSION_MINOR.to_ne_bytes());
    out.extend_from_slice(&0i32.to_ne_bytes());
    out.extend_from_slice(&0u32.to_ne_bytes());
    out.extend_from_slice(&SNAPLEN.to_ne_bytes());
    out.extend_from_slice(&LINKTYPE_ETHERNET.to_ne_bytes());
    for record in records {
        out.extend_from_slice(&record.ts_sec.to_ne_bytes());
        out.extend_from_slice(&record.ts_usec.to_ne_bytes());
        out.extend_from_slice(&(record.frame.len() as u32).to_ne_bytes());
        out.extend_from_slice(&record.orig_len.to_ne_bytes());
        out.extend_from_slice(&record.frame);
    }
    out
}

pub fn read_capture(path: impl AsRef<Path>) -> Result<Vec<CaptureRecord>, PcapError> {
    parse_capture(&fs::read(path)?)
}

pub fn write_capture(path: impl AsRef<Path>, records: &[CaptureRecord]) -> io::Result<()> {
    fs::write(path, encode_capture(records))
}
