//! Staged frame decode: a synchronous pipeline, one slot per stage.
//!
//! Each tick, every occupied stage runs its transform the first time it
//! holds that slot, the last stage emits, and slots advance one stage when
//! the next slot is free. A frame is refused at the gate while stage 0 is
//! occupied; nothing is ever overwritten in place. Running the default
//! stage order over a frame fills the identical metadata that
//! [`crate::parse::extract_metadata`] produces in one shot.

use crate::crc32::{self, FcsVerdict};
use crate::ethernet::{FrameError, MacAddr, MAX_FRAME, MIN_FRAME};
use crate::parse::{self, L2Class, L4Info, ParsedPacket};
use crate::ipv4::Ipv4Header;
use thiserror::Error;

/// The stage registry. `CrcCheck` must close the pipeline when present,
/// and `L3L4Parse` needs `MacExtract` somewhere ahead of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageKind {
    SfdCheck,
    MacExtract,
    LengthCount,
    L3L4Parse,
    CrcCheck,
}

impl StageKind {
    pub const DEFAULT_ORDER: [StageKind; 5] = [
        StageKind::SfdCheck,
        StageKind::MacExtract,
        StageKind::LengthCount,
        StageKind::L3L4Parse,
        StageKind::CrcCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StageKind::SfdCheck => "sfd_check",
            StageKind::MacExtract => "mac_extract",
            StageKind::LengthCount => "length_count",
            StageKind::L3L4Parse => "l3l4_parse",
            StageKind::CrcCheck => "crc_check",
        }
    }

    pub fn from_name(name: &str) -> Option<StageKind> {
        Self::DEFAULT_ORDER.into_iter().find(|kind| kind.name() == name)
    }
}

impl std::fmt::Display for StageKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A stage's position and kind within one pipeline build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageId {
    pub index: usize,
    pub kind: StageKind,
}

/// Metadata under construction. Fields stay `None` until the owning stage
/// has run; a pipeline missing a stage simply leaves its fields empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SlotMeta {
    pub size_error: Option<FrameError>,
    pub dst_mac: Option<MacAddr>,
    pub src_mac: Option<MacAddr>,
    pub l2: Option<L2Class>,
    pub frame_len: Option<usize>,
    pub ip: Option<Ipv4Header>,
    pub l4: Option<L4Info>,
    pub fcs: Option<FcsVerdict>,
}

impl SlotMeta {
    /// Collapses into the one-shot parser's result type. `None` until the
    /// MAC, length and classification stages have all contributed.
    pub fn into_parsed(self) -> Option<ParsedPacket> {
        Some(ParsedPacket {
            dst_mac: self.dst_mac?,
            src_mac: self.src_mac?,
            l2: self.l2?,
            frame_len: self.frame_len?,
            fcs: self.fcs.unwrap_or(FcsVerdict::Unchecked),
            ip: self.ip,
            l4: self.l4,
        })
    }
}

/// One frame in flight: its bytes, the metadata gathered so far, the tick
/// it entered, and which stage ran at which tick.
#[derive(Debug, Clone)]
pub struct PipelineSlot {
    pub frame: Vec<u8>,
    pub meta: SlotMeta,
    pub entry_tick: u64,
    pub trace: Vec<(StageId, u64)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("unknown stage name {0:?}")]
    UnknownStage(String),
    #[error("stage order invalid: {0}")]
    OrderingViolation(String),
    #[error("a pipeline needs at least one stage")]
    EmptyPipeline,
}

#[derive(Debug)]
pub struct Pipeline {
    stages: Vec<StageKind>,
    slots: Vec<Option<PipelineSlot>>,
    tick: u64,
}

/// Builds a pipeline from registry names, enforcing the ordering rules.
pub fn build_pipeline(stage_names: &[&str]) -> Result<Pipeline, PipelineError> {
    let stages = stage_names
        .iter()
        .map(|&name| StageKind::from_name(name).ok_or_else(|| PipelineError::UnknownStage(name.into())))
        .collect::<Result<Vec<_>, _>>()?;
    Pipeline::with_stages(stages)
}

impl Pipeline {
    pub fn with_stages(stages: Vec<StageKind>) -> Result<Self, PipelineError> {
        if stages.is_empty() {
            return Err(PipelineError::EmptyPipeline);
        }
        for (i, kind) in stages.iter().enumerate() {
            if stages[i + 1..].contains(kind) {
                return Err(PipelineError::OrderingViolation(format!("duplicate stage {kind}")));
            }
            if *kind == StageKind::CrcCheck && i != stages.len() - 1 {
                return Err(PipelineError::OrderingViolation("crc_check must be last".into()));
            }
        }
        let l3 = stages.iter().position(|&k| k == StageKind::L3L4Parse);
        let mac = stages.iter().position(|&k| k == StageKind::MacExtract);
        if let Some(l3) = l3 {
            if mac.is_none_or(|mac| mac > l3) {
                return Err(PipelineError::OrderingViolation(
                    "l3l4_parse needs mac_extract ahead of it".into(),
                ));
            }
        }
        let depth = stages.len();
        Ok(Pipeline { stages, slots: (0..depth).map(|_| None).collect(), tick: 0 })
    }

    /// The full five-stage decode order.
    pub fn default_order() -> Self {
        Self::with_stages(StageKind::DEFAULT_ORDER.to_vec()).expect("default order is valid")
    }

    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    pub fn stages(&self) -> &[StageKind] {
        &self.stages
    }

    /// Ticks elapsed so far.
    pub fn now(&self) -> u64 {
        self.tick
    }

    pub fn occupancy(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    /// Offers a frame to stage 0. Refused (returning `false`) while the
    /// stage 0 slot is still occupied; back-pressure, not an error.
    pub fn inject(&mut self, frame: &[u8]) -> bool {
        if self.slots[0].is_some() {
            return false;
        }
        self.slots[0] = Some(PipelineSlot {
            frame: frame.to_vec(),
            meta: SlotMeta::default(),
            entry_tick: self.tick,
            trace: Vec::with_capacity(self.depth()),
        });
        true
    }

    /// Advances one clock: stages run on their occupants (once per stage
    /// per slot), the last stage emits, everyone else moves up when the
    /// next slot is free.
    pub fn tick(&mut self) -> Option<PipelineSlot> {
        self.tick += 1;
        let last = self.depth() - 1;
        let mut emitted = None;
        for index in (0..=last).rev() {
            let Some(slot) = self.slots[index].as_mut() else { continue };
            if slot.trace.len() == index {
                let kind = self.stages[index];
                run_stage(kind, &slot.frame, &mut slot.meta);
                slot.trace.push((StageId { index, kind }, self.tick));
            }
            if index == last {
                emitted = self.slots[index].take();
            } else if self.slots[index + 1].is_none() {
                self.slots[index + 1] = self.slots[index].take();
            }
        }
        emitted
    }
}

/// Stage transforms are total: malformed input marks the meta and the slot
/// keeps flowing. Field semantics mirror the one-shot parser exactly.
fn run_stage(kind: StageKind, frame: &[u8], meta: &mut SlotMeta) {
    match kind {
        StageKind::SfdCheck => {
            meta.size_error = if frame.len() < MIN_FRAME {
                Some(FrameError::FrameTooShort { len: frame.len() })
            } else if frame.len() > MAX_FRAME {
                Some(FrameError::FrameTooLong { len: frame.len() })
            } else {
                None
            };
        }
        StageKind::MacExtract => {
            if frame.len() >= 14 {
                meta.dst_mac = Some(MacAddr(frame[0..6].try_into().unwrap()));
                meta.src_mac = Some(MacAddr(frame[6..12].try_into().unwrap()));
            }
        }
        StageKind::LengthCount => {
            meta.frame_len = Some(frame.len());
            if frame.len() >= 14 {
                meta.l2 = Some(parse::classify_l2(u16::from_be_bytes([frame[12], frame[13]])));
            }
        }
        StageKind::L3L4Parse => {
            if frame.len() >= 18 {
                let length_type = u16::from_be_bytes([frame[12], frame[13]]);
                let payload = &frame[14..frame.len() - 4];
                let (ip, l4) = parse::ip_and_l4(length_type, payload);
                meta.ip = ip;
                meta.l4 = l4;
            }
        }
        StageKind::CrcCheck => {
            meta.fcs = Some(crc32::fcs_verify(frame).unwrap_or(FcsVerdict::Unchecked));
        }
    }
}
