//! L2 forwarding: source learning with aging, destination lookup, and the
//! three processing modes. Store-and-forward verifies the FCS before any
//! decision; cut-through decides from the first 14 header bytes and keeps
//! its promise even when the tail turns out corrupt; hybrid runs
//! cut-through until the observed error level crosses a threshold, then
//! falls back to store-and-forward until the window is clean again.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::crc32::{self, FcsVerdict};
use crate::ethernet::{MacAddr, MAX_FRAME, MIN_FRAME};
use crate::parse::ParsedPacket;
use crate::types::{DropReason, PortId};

/// Aging limit matching a 300 second default; the table itself is
/// unit-agnostic, so callers scale this by their clock resolution.
pub const DEFAULT_AGING_SECS: u64 = 300;
pub const DEFAULT_WINDOW: usize = 100;
pub const DEFAULT_ENTER_SF: f64 = 0.05;
pub const DEFAULT_EXIT_SF: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableEntry {
    pub port: PortId,
    pub learned_at: u64,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("a broadcast address can never be a frame source")]
pub struct RefuseBroadcastSource;

/// The learned station table. Timestamps are plain `u64` ticks in whatever
/// unit the caller keeps time; only differences against `aging_limit`
/// matter.
#[derive(Debug, Clone)]
pub struct MacTable {
    entries: BTreeMap<MacAddr, TableEntry>,
    aging_limit: u64,
}

impl MacTable {
    pub fn new(aging_limit: u64) -> Self {
        MacTable { entries: BTreeMap::new(), aging_limit }
    }

    /// Binds `src` to `ingress`, refreshing or moving any previous binding.
    pub fn learn(&mut self, src: MacAddr, ingress: PortId, now: u64) -> Result<(), RefuseBroadcastSource> {
        if src.is_broadcast() {
            return Err(RefuseBroadcastSource);
        }
        self.entries.insert(src, TableEntry { port: ingress, learned_at: now });
        Ok(())
    }

    /// The bound port, unless the entry is absent or older than the aging
    /// limit.
    pub fn lookup(&self, dst: MacAddr, now: u64) -> Option<PortId> {
        let entry = self.entries.get(&dst)?;
        (now.saturating_sub(entry.learned_at) <= self.aging_limit).then_some(entry.port)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MacAddr, &TableEntry)> {
        self.entries.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveMode {
    StoreForward,
    CutThrough,
}

impl ActiveMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ActiveMode::StoreForward => "store_forward",
            ActiveMode::CutThrough => "cut_through",
        }
    }
}

impl std::fmt::Display for ActiveMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Configured mode. `Hybrid` means the active mode floats with the error
/// window; the fixed modes never transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchMode {
    StoreForward,
    CutThrough,
    Hybrid,
}

impl SwitchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SwitchMode::StoreForward => "sf",
            SwitchMode::CutThrough => "ct",
            SwitchMode::Hybrid => "hybrid",
        }
    }

    pub fn from_name(name: &str) -> Option<SwitchMode> {
        match name {
            "sf" => Some(SwitchMode::StoreForward),
            "ct" => Some(SwitchMode::CutThrough),
            "hybrid" => Some(SwitchMode::Hybrid),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForwardKind {
    Unicast(PortId),
    /// Every port except ingress, ascending.
    Flood(Vec<PortId>),
    Discard(DropReason),
}

impl ForwardKind {
    pub fn is_forward(&self) -> bool {
        !matches!(self, ForwardKind::Discard(_))
    }

    /// Egress ports this action drives, empty for discards.
    pub fn ports(&self) -> &[PortId] {
        match self {
            ForwardKind::Unicast(port) => std::slice::from_ref(port),
            ForwardKind::Flood(ports) => ports,
            ForwardKind::Discard(_) => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardAction {
    pub kind: ForwardKind,
    pub mode_used: ActiveMode,
}

/// A hybrid transition, carrying the window census that triggered it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeChange {
    pub to: ActiveMode,
    pub bad: usize,
    pub of: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SwitchConfigError {
    #[error("switch needs at least one port")]
    ZeroPorts,
    #[error("error window must hold at least one verdict")]
    ZeroWindow,
    #[error("enter threshold {enter} must exceed exit threshold {exit}")]
    ThresholdOrder { enter: f64, exit: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchConfig {
    pub ports: u32,
    pub mode: SwitchMode,
    pub window: usize,
    pub enter_sf: f64,
    pub exit_sf: f64,
    /// Same unit as the `now` values fed to the switch.
    pub aging_limit: u64,
}

impl SwitchConfig {
    pub fn new(ports: u32, mode: SwitchMode) -> Self {
        SwitchConfig {
            ports,
            mode,
            window: DEFAULT_WINDOW,
            enter_sf: DEFAULT_ENTER_SF,
            exit_sf: DEFAULT_EXIT_SF,
            aging_limit: DEFAULT_AGING_SECS,
        }
    }
}

/// Sliding window of recent FCS verdicts plus the floating mode. The bad
/// fraction is taken over the verdicts currently held, so the window is
/// meaningful from the first push; hysteresis comes from the threshold gap.
#[derive(Debug, Clone)]
pub struct HybridState {
    window: VecDeque<bool>,
    capacity: usize,
    bad: usize,
    mode: ActiveMode,
    enter_sf: f64,
    exit_sf: f64,
}

impl HybridState {
    pub fn new(capacity: usize, enter_sf: f64, exit_sf: f64) -> Result<Self, SwitchConfigError> {
        if capacity == 0 {
            return Err(SwitchConfigError::ZeroWindow);
        }
        if enter_sf <= exit_sf {
            return Err(SwitchConfigError::ThresholdOrder { enter: enter_sf, exit: exit_sf });
        }
        Ok(HybridState {
            window: VecDeque::with_capacity(capacity),
            capacity,
            bad: 0,
            mode: ActiveMode::CutThrough,
            enter_sf,
            exit_sf,
        })
    }

    pub fn mode(&self) -> ActiveMode {
        self.mode
    }

    pub fn bad_fraction(&self) -> f64 {
        if self.window.is_empty() {
            0.0
        } else {
            self.bad as f64 / self.window.len() as f64
        }
    }

    /// Records a verdict without letting the mode move. Used when the
    /// configured mode is fixed and the window is bookkeeping only.
    pub fn record(&mut self, crc_ok: bool) {
        if self.window.len() == self.capacity {
            if self.window.pop_front() == Some(false) {
                self.bad -= 1;
            }
        }
        self.window.push_back(crc_ok);
        if !crc_ok {
            self.bad += 1;
        }
    }

    /// Records a verdict and applies the transition rule: cut-through
    /// leaves when the bad fraction strictly exceeds the entry threshold,
    /// store-and-forward leaves when it falls strictly below the exit one.
    pub fn update(&mut self, crc_ok: bool) -> Option<ModeChange> {
        self.record(crc_ok);
        let fraction = self.bad_fraction();
        let next = match self.mode {
            ActiveMode::CutThrough if fraction > self.enter_sf => ActiveMode::StoreForward,
            ActiveMode::StoreForward if fraction < self.exit_sf => ActiveMode::CutThrough,
            _ => return None,
        };
        self.mode = next;
        Some(ModeChange { to: next, bad: self.bad, of: self.window.len() })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SwitchStats {
    /// Frames offered to the switch, regardless of what became of them.
    pub frames: u64,
    pub unicasts: u64,
    pub floods: u64,
    pub discards: BTreeMap<DropReason, u64>,
    /// Frames already committed to egress when their FCS turned out bad.
    pub forwarded_bad_crc: u64,
    /// Learn refusals for broadcast source addresses.
    pub malformed_sources: u64,
    pub sf_entries: u64,
    pub sf_exits: u64,
}

impl SwitchStats {
    pub fn dropped(&self) -> u64 {
        self.discards.values().sum()
    }
}

/// Everything one frame produced: the decision, the FCS verdict when one
/// was reached, and a hybrid transition when this frame caused one.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchOutcome {
    pub action: ForwardAction,
    pub verdict: Option<FcsVerdict>,
    pub mode_change: Option<ModeChange>,
}

#[derive(Debug)]
pub struct Switch {
    config: SwitchConfig,
    table: MacTable,
    hybrid: HybridState,
    stats: SwitchStats,
}

impl Switch {
    pub fn new(config: SwitchConfig) -> Result<Self, SwitchConfigError> {
        if config.ports == 0 {
            return Err(SwitchConfigError::ZeroPorts);
        }
        let hybrid = HybridState::new(config.window, config.enter_sf, config.exit_sf)?;
        let table = MacTable::new(config.aging_limit);
        Ok(Switch { config, table, hybrid, stats: SwitchStats::default() })
    }

    pub fn config(&self) -> &SwitchConfig {
        &self.config
    }

    pub fn table(&self) -> &MacTable {
        &self.table
    }

    pub fn stats(&self) -> &SwitchStats {
        &self.stats
    }

    pub fn bad_fraction(&self) -> f64 {
        self.hybrid.bad_fraction()
    }

    /// The mode the next frame will be processed in.
    pub fn active_mode(&self) -> ActiveMode {
        match self.config.mode {
            SwitchMode::StoreForward => ActiveMode::StoreForward,
            SwitchMode::CutThrough => ActiveMode::CutThrough,
            SwitchMode::Hybrid => self.hybrid.mode(),
        }
    }

    /// Learns the source binding, then decides by destination: group
    /// addresses and unknown stations flood, a known station forwards
    /// unicast unless it sits on the ingress segment.
    pub fn forward_decision(&mut self, meta: &ParsedPacket, ingress: PortId, now: u64) -> ForwardAction {
        self.learn_checked(meta.src_mac, ingress, now);
        ForwardAction { kind: self.decide(meta.dst_mac, ingress, now), mode_used: self.active_mode() }
    }

    fn learn_checked(&mut self, src: MacAddr, ingress: PortId, now: u64) {
        if self.table.learn(src, ingress, now).is_err() {
            self.stats.malformed_sources += 1;
        }
    }

    fn decide(&mut self, dst: MacAddr, ingress: PortId, now: u64) -> ForwardKind {
        let kind = if dst.is_multicast() {
            ForwardKind::Flood(self.other_ports(ingress))
        } else {
            match self.table.lookup(dst, now) {
                Some(port) if port == ingress => ForwardKind::Discard(DropReason::SameSegment),
                Some(port) => ForwardKind::Unicast(port),
                None => ForwardKind::Flood(self.other_ports(ingress)),
            }
        };
        match &kind {
            ForwardKind::Unicast(_) => self.stats.unicasts += 1,
            ForwardKind::Flood(_) => self.stats.floods += 1,
            ForwardKind::Discard(reason) => self.count_discard(*reason),
        }
        kind
    }

    fn other_ports(&self, ingress: PortId) -> Vec<PortId> {
        (0..self.config.ports).filter(|&p| p != ingress).collect()
    }

    fn count_discard(&mut self, reason: DropReason) {
        *self.stats.discards.entry(reason).or_insert(0) += 1;
    }

    fn feed_window(&mut self, crc_ok: bool) -> Option<ModeChange> {
        if self.config.mode == SwitchMode::Hybrid {
            let change = self.hybrid.update(crc_ok);
            match change.map(|c| c.to) {
                Some(ActiveMode::StoreForward) => self.stats.sf_entries += 1,
                Some(ActiveMode::CutThrough) => self.stats.sf_exits += 1,
                None => {}
            }
            change
        } else {
            self.hybrid.record(crc_ok);
            None
        }
    }

    fn size_error(len: usize) -> bool {
        len < MIN_FRAME || len > MAX_FRAME
    }

    /// Counts and discards a frame whose size is outside the legal range.
    /// No decision, no verdict, no window feed.
    pub fn reject_malformed(&mut self, mode: ActiveMode) -> SwitchOutcome {
        self.stats.frames += 1;
        self.count_discard(DropReason::Malformed);
        SwitchOutcome {
            action: ForwardAction { kind: ForwardKind::Discard(DropReason::Malformed), mode_used: mode },
            verdict: None,
            mode_change: None,
        }
    }

    /// Buffers the whole frame: verify first, decide after. A corrupt
    /// frame is discarded before it can touch the table.
    pub fn process_frame_store_forward(&mut self, raw: &[u8], ingress: PortId, now: u64) -> SwitchOutcome {
        if Self::size_error(raw.len()) {
            return self.reject_malformed(ActiveMode::StoreForward);
        }
        self.stats.frames += 1;
        let verdict = crc32::fcs_verify(raw).expect("size gate guarantees five bytes");
        if verdict == FcsVerdict::Bad {
            let mode_change = self.feed_window(false);
            self.count_discard(DropReason::CrcError);
            return SwitchOutcome {
                action: ForwardAction {
                    kind: ForwardKind::Discard(DropReason::CrcError),
                    mode_used: ActiveMode::StoreForward,
                },
                verdict: Some(verdict),
                mode_change,
            };
        }
        let mode_change = self.feed_window(true);
        self.learn_checked(MacAddr(raw[6..12].try_into().unwrap()), ingress, now);
        let kind = self.decide(MacAddr(raw[0..6].try_into().unwrap()), ingress, now);
        SwitchOutcome {
            action: ForwardAction { kind, mode_used: ActiveMode::StoreForward },
            verdict: Some(verdict),
            mode_change,
        }
    }

    /// The cut-through dispatch point: only the first 14 bytes have
    /// arrived, so this decides by lookup alone and defers learning until
    /// the frame completes with a good FCS.
    pub fn ct_decide(&mut self, header: &[u8], ingress: PortId, now: u64) -> ForwardAction {
        debug_assert!(header.len() >= 14);
        self.stats.frames += 1;
        let kind = self.decide(MacAddr(header[0..6].try_into().unwrap()), ingress, now);
        ForwardAction { kind, mode_used: ActiveMode::CutThrough }
    }

    /// The cut-through completion point, once the last byte is in: verify
    /// the FCS, learn the source only from a clean frame, feed the error
    /// window, and count a forward that is already beyond recall.
    pub fn ct_complete(
        &mut self,
        raw: &[u8],
        ingress: PortId,
        now: u64,
        action: &ForwardAction,
    ) -> (FcsVerdict, Option<ModeChange>) {
        let verdict = crc32::fcs_verify(raw).expect("size gate guarantees five bytes");
        if verdict == FcsVerdict::Ok {
            self.learn_checked(MacAddr(raw[6..12].try_into().unwrap()), ingress, now);
        } else if action.kind.is_forward() {
            self.stats.forwarded_bad_crc += 1;
        }
        let mode_change = self.feed_window(verdict == FcsVerdict::Ok);
        (verdict, mode_change)
    }

    /// Cut-through over a frame that is already fully available: decide
    /// from the header, then run completion on the tail.
    pub fn process_frame_cut_through(&mut self, raw: &[u8], ingress: PortId, now: u64) -> SwitchOutcome {
        if Self::size_error(raw.len()) {
            return self.reject_malformed(ActiveMode::CutThrough);
        }
        let action = self.ct_decide(&raw[..14], ingress, now);
        let (verdict, mode_change) = self.ct_complete(raw, ingress, now, &action);
        SwitchOutcome { action, verdict: Some(verdict), mode_change }
    }

    /// Processes one frame in whatever mode is active right now.
    pub fn process_frame(&mut self, raw: &[u8], ingress: PortId, now: u64) -> SwitchOutcome {
        match self.active_mode() {
            ActiveMode::StoreForward => self.process_frame_store_forward(raw, ingress, now),
            ActiveMode::CutThrough => self.process_frame_cut_through(raw, ingress, now),
        }
    }
}
