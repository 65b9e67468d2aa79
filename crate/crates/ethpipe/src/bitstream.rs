//! Line-level serialization and receive-side synchronization.
//!
//! On the wire a frame is announced by 62 alternating bits `1010…10`
//! closed by the two-bit start delimiter `11`; data octets follow with
//! their least-significant bit first. Between frames the line goes idle
//! for at least the 96-bit interframe gap.

pub const PREAMBLE_BITS: usize = 62;
pub const SFD_BITS: usize = 2;
/// Minimum idle line time between frames, in bit-times.
pub const IFG_BITS: u64 = 96;

/// One bit-time of line state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Zero,
    One,
    Idle,
}

/// Serializes the preamble, the start delimiter and the frame's octets
/// (least-significant bit first) as line symbols.
pub fn frame_symbols(frame: &[u8]) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(PREAMBLE_BITS + SFD_BITS + frame.len() * 8);
    for i in 0..PREAMBLE_BITS {
        out.push(if i % 2 == 0 { Symbol::One } else { Symbol::Zero });
    }
    out.push(Symbol::One);
    out.push(Symbol::One);
    for &byte in frame {
        for j in 0..8 {
            out.push(if (byte >> j) & 1 != 0 { Symbol::One } else { Symbol::Zero });
        }
    }
    out
}

/// Builds a symbol stream frame by frame with explicit idle gaps.
#[derive(Debug, Default)]
pub struct StreamBuilder {
    symbols: Vec<Symbol>,
}

impl StreamBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn idle(mut self, bits: u64) -> Self {
        self.symbols.extend(std::iter::repeat_n(Symbol::Idle, bits as usize));
        self
    }

    pub fn frame(mut self, frame: &[u8]) -> Self {
        self.symbols.extend(frame_symbols(frame));
        self
    }

    pub fn finish(self) -> Vec<Symbol> {
        self.symbols
    }
}

/// A frame recovered from a stream. `start_bit` indexes the first data
/// bit (the one right after the start delimiter) in the source stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveredFrame {
    pub bytes: Vec<u8>,
    pub start_bit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncViolation {
    /// Idle gap before this frame was under [`IFG_BITS`].
    ShortGap { gap: u64 },
    /// Carrier dropped mid-octet (or right after the delimiter); the
    /// partial frame is discarded.
    Runt { bits: usize },
    /// Carrier activity that never produced a valid preamble + delimiter.
    NoSync,
}

/// What [`sync_bitstream`] recovered. `gaps` holds the idle bit-times
/// between consecutive recovered frames (always one entry fewer than
/// `frames`); `violations` pairs a frame index with what went wrong there.
/// A `Runt`/`NoSync` index names the slot the discarded frame would have
/// taken.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct SyncReport {
    pub frames: Vec<RecoveredFrame>,
    pub gaps: Vec<u64>,
    pub violations: Vec<(usize, SyncViolation)>,
}

/// Scans a symbol stream for frames: at least [`PREAMBLE_BITS`] alternating
/// bits closed by `11`, then data octets assembled least-significant bit
/// first until the carrier drops. Malformed regions become violations,
/// never errors.
pub fn sync_bitstream(stream: &[Symbol]) -> SyncReport {
    let mut report = SyncReport::default();
    let mut idle_since_emit: u64 = 0;
    let mut pos = 0;

    while pos < stream.len() {
        if stream[pos] == Symbol::Idle {
            idle_since_emit += 1;
            pos += 1;
            continue;
        }
        // Carrier region: [pos, end)
        let start = pos;
        while pos < stream.len() && stream[pos] != Symbol::Idle {
            pos += 1;
        }
        let region: Vec<bool> = stream[start..pos].iter().map(|&s| s == Symbol::One).collect();

        match scan_region(&region) {
            RegionOutcome::Frame { bytes, data_start } => {
                let index = report.frames.len();
                if index > 0 {
                    report.gaps.push(idle_since_emit);
                    if idle_since_emit < IFG_BITS {
                        report.violations.push((index, SyncViolation::ShortGap { gap: idle_since_emit }));
                    }
                }
                idle_since_emit = 0;
                report.frames.push(RecoveredFrame { bytes, start_bit: start + data_start });
            }
            RegionOutcome::Runt { bits } => {
                report.violations.push((report.frames.len(), SyncViolation::Runt { bits }));
            }
            RegionOutcome::NoSync => {
                report.violations.push((report.frames.len(), SyncViolation::NoSync));
            }
        }
    }
    report
}

enum RegionOutcome {
    Frame { bytes: Vec<u8>, data_start: usize },
    Runt { bits: usize },
    NoSync,
}

/// Looks for the delimiter inside one carrier region. Sync fires on two
/// consecutive ones preceded by an alternating run of at least
/// PREAMBLE_BITS + 1 bits (the preamble plus the first delimiter bit).
fn scan_region(bits: &[bool]) -> RegionOutcome {
    let mut run = 1usize;
    for i in 1..bits.len() {
        if bits[i] != bits[i - 1] {
            run += 1;
            continue;
        }
        if bits[i] && run >= PREAMBLE_BITS + 1 {
            return assemble(bits, i + 1);
        }
        run = 1;
    }
    RegionOutcome::NoSync
}

fn assemble(bits: &[bool], data_start: usize) -> RegionOutcome {
    let data = &bits[data_start..];
    if data.is_empty() || data.len() % 8 != 0 {
        return RegionOutcome::Runt { bits: data.len() };
    }
    let bytes = data
        .chunks_exact(8)
        .map(|oct| oct.iter().enumerate().fold(0u8, |b, (j, &bit)| b | ((bit as u8) << j)))
        .collect();
    RegionOutcome::Frame { bytes, data_start }
}
