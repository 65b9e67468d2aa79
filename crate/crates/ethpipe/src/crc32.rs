//! Frame check sequence: CRC-32 with the 802.3 generator polynomial
//! 0x04C11DB7, processed in bit-reflected form (octets enter least-
//! significant bit first, matching serialization order), initial register
//! all ones, final xor all ones.
//!
//! Two independent computations live here on purpose. `crc32_compute` is
//! the table-driven production path; `crc32_bitwise_oracle` pushes the
//! stream through the LFSR one bit per step and exists only so the two
//! can be checked against each other.

use thiserror::Error;

/// Reflected form of the 802.3 generator polynomial.
const POLY_REFLECTED: u32 = 0xEDB8_8320;

/// Register value left behind after clocking a frame plus its own correct
/// FCS through the LFSR (no final xor). Constant for any valid frame.
pub const FCS_RESIDUE: u32 = 0xDEBB_20E3;

const fn build_table() -> [u32; 256] {
    let mut table = [0u32; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = i as u32;
        let mut bit = 0;
        while bit < 8 {
            crc = if crc & 1 != 0 { (crc >> 1) ^ POLY_REFLECTED } else { crc >> 1 };
            bit += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
}

static CRC_TABLE: [u32; 256] = build_table();

/// Table-driven CRC-32 over `data`, one octet per step.
pub fn crc32_compute(data: &[u8]) -> u32 {
    !register_after(data)
}

/// LFSR register after consuming `data`, without the final xor.
fn register_after(data: &[u8]) -> u32 {
    let mut reg = 0xFFFF_FFFFu32;
    for &b in data {
        reg = (reg >> 8) ^ CRC_TABLE[((reg ^ b as u32) & 0xFF) as usize];
    }
    reg
}

/// Bit-serial reference CRC: one stream bit per step through the reflected
/// LFSR, least-significant bit of each octet first. Deliberately slow and
/// structurally unrelated to the table path; used as ground truth.
pub fn crc32_bitwise_oracle(data: &[u8]) -> u32 {
    let mut reg = 0xFFFF_FFFFu32;
    for &byte in data {
        for j in 0..8 {
            let bit = (byte >> j) & 1;
            let out = (reg ^ bit as u32) & 1;
            reg >>= 1;
            if out != 0 {
                reg ^= POLY_REFLECTED;
            }
        }
    }
    reg ^ 0xFFFF_FFFF
}

/// Outcome of an FCS check. `Unchecked` never comes out of [`fcs_verify`];
/// it marks parse results where verification was skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcsVerdict {
    Ok,
    Bad,
    Unchecked,
}

impl FcsVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            FcsVerdict::Ok => "ok",
            FcsVerdict::Bad => "bad",
            FcsVerdict::Unchecked => "unchecked",
        }
    }
}

impl std::fmt::Display for FcsVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum FcsError {
    #[error("{len} bytes cannot carry a 4-byte FCS and any content")]
    InputTooShort { len: usize },
}

/// Checks the trailing FCS of `frame` (last four bytes, least-significant
/// byte first, covering everything ahead of them).
///
/// The verdict is established two ways: recompute-and-compare, and the
/// residue form (the register over the whole frame including the FCS must
/// land on [`FCS_RESIDUE`]). The two are equivalent by construction and
/// both must hold for an `Ok`.
pub fn fcs_verify(frame: &[u8]) -> Result<FcsVerdict, FcsError> {
    if frame.len() < 5 {
        return Err(FcsError::InputTooShort { len: frame.len() });
    }
    let (body, tail) = frame.split_at(frame.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    let recompute_ok = crc32_compute(body) == stored;
    let residue_ok = register_after(frame) == FCS_RESIDUE;
    debug_assert_eq!(recompute_ok, residue_ok);
    Ok(if recompute_ok && residue_ok { FcsVerdict::Ok } else { FcsVerdict::Bad })
}

/// Appends the FCS of `body` to it, least-significant byte first.
pub fn append_fcs(body: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(body.len() + 4);
    out.extend_from_slice(body);
    out.extend_from_slice(&crc32_compute(body).to_le_bytes());
    out
}
