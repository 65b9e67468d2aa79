//! Deterministic event-driven fabric: links with real serialization times,
//! a processing-delay budget, and a switch or router device in the middle.
//!
//! The engine clock counts nanoseconds. Schedules speak bit-times of the
//! ingress link; a frame occupies the wire for (8 preamble octets + frame
//! octets) x 8 bit-times. Store-and-forward decides once the last bit is
//! in, cut-through once the 14 header bytes are in, both plus the
//! configured processing delay. Egress ports serialize one frame at a
//! time at their own rate and keep the interframe gap between frames.
//! Identical (config, schedule, seed) inputs produce identical logs.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitstream::IFG_BITS;
use crate::crc32::FcsVerdict;
use crate::ethernet::{MAX_FRAME, MIN_FRAME};
use crate::router::{Router, RouterStats};
use crate::switch::{
    ActiveMode, ForwardAction, ForwardKind, ModeChange, Switch, SwitchConfig, SwitchConfigError,
    SwitchStats,
};
use crate::types::{DropReason, PortId};

pub const NS_PER_SEC: u64 = 1_000_000_000;
/// Preamble plus SFD occupy eight octet times ahead of the frame proper.
pub const PREAMBLE_OCTETS: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkRate {
    M10,
    M100,
    G1,
}

impl LinkRate {
    pub fn bits_per_sec(self) -> u64 {
        match self {
            LinkRate::M10 => 10_000_000,
            LinkRate::M100 => 100_000_000,
            LinkRate::G1 => 1_000_000_000,
        }
    }

    /// Exact by construction: all three rates divide a nanosecond grid.
    pub fn ns_per_bit(self) -> u64 {
        NS_PER_SEC / self.bits_per_sec()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LinkRate::M10 => "10M",
            LinkRate::M100 => "100M",
            LinkRate::G1 => "1G",
        }
    }

    pub fn from_str(s: &str) -> Option<LinkRate> {
        match s {
            "10M" => Some(LinkRate::M10),
            "100M" => Some(LinkRate::M100),
            "1G" => Some(LinkRate::G1),
            _ => None,
        }
    }
}

impl std::fmt::Display for LinkRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkModel {
    pub rate: LinkRate,
    pub ifg_bits: u64,
}

impl LinkModel {
    pub fn new(rate: LinkRate) -> Self {
        LinkModel { rate, ifg_bits: IFG_BITS }
    }
}

/// Error injection for one scheduled frame: a chosen bit, or one drawn
/// from the run's seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptSpec {
    Bit(u64),
    Random,
}

#[derive(Debug, Clone)]
pub struct TimedFrame {
    pub frame: Vec<u8>,
    /// Bit-time stamp on the ingress link.
    pub arrival_start: u64,
    pub port: PortId,
    pub corrupt: Option<CorruptSpec>,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("bit {index} is out of range for a {bits}-bit frame")]
pub struct IndexOutOfRange {
    pub index: u64,
    pub bits: u64,
}

/// Returns a copy of `frame` with one bit flipped. Bits count from the
/// first octet's least significant bit, matching wire order.
pub fn inject_error(frame: &[u8], bit_index: u64) -> Result<Vec<u8>, IndexOutOfRange> {
    let bits = frame.len() as u64 * 8;
    if bit_index >= bits {
        return Err(IndexOutOfRange { index: bit_index, bits });
    }
    let mut out = frame.to_vec();
    out[(bit_index / 8) as usize] ^= 1 << (bit_index % 8);
    Ok(out)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("port {port}: frame at bit-time {second} starts inside the frame at {first} or its interframe gap")]
    ScheduleOverlap { port: PortId, first: u64, second: u64 },
    #[error("schedule names port {port} but only {ports} links exist")]
    UnknownPort { port: PortId, ports: usize },
    #[error("route egress port {port} is outside the {ports} configured links")]
    UnknownEgress { port: PortId, ports: usize },
    #[error(transparent)]
    CorruptBit(#[from] IndexOutOfRange),
    #[error("device has {device_ports} ports but {link_ports} links are configured")]
    PortCountMismatch { device_ports: u32, link_ports: usize },
    #[error(transparent)]
    Switch(#[from] SwitchConfigError),
}

#[derive(Debug)]
pub enum DeviceSpec {
    /// `aging_limit` is read against the nanosecond engine clock.
    Switch(SwitchConfig),
    Router(Router),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimTuning {
    /// Decode stages the device spends on each frame.
    pub pipeline_ticks: u64,
    /// Bit-times (of the ingress link) one tick costs.
    pub bits_per_tick: u64,
    /// Header bytes that must arrive before cut-through can dispatch.
    pub ct_dispatch_bytes: u64,
    /// Frames an egress queue holds before overflowing.
    pub egress_queue_frames: usize,
}

impl Default for SimTuning {
    fn default() -> Self {
        SimTuning { pipeline_ticks: 5, bits_per_tick: 8, ct_dispatch_bytes: 14, egress_queue_frames: 64 }
    }
}

#[derive(Debug)]
pub struct SimConfig {
    pub links: Vec<LinkModel>,
    pub device: DeviceSpec,
    pub tuning: SimTuning,
}

/// One egress copy's journey, in bit-times of the ingress link: first bit
/// in to first bit out, and to last bit out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatencyRecord {
    pub frame: usize,
    pub egress: PortId,
    pub first_bit: u64,
    pub last_bit: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PortStats {
    pub rx_frames: u64,
    pub tx_frames: u64,
    pub crc_errors: u64,
    pub forwarded_bad_crc: u64,
    pub floods: u64,
    /// Frames from this port that were dispatched toward at least one
    /// egress queue.
    pub forwarded: u64,
    /// Frame-level reasons count against the ingress port; `Overflow`
    /// counts lost copies against the egress port.
    pub drops: BTreeMap<DropReason, u64>,
    pub ifg_violations: u64,
    pub latencies: Vec<LatencyRecord>,
}

impl PortStats {
    /// Drops attributed to this port in its ingress role.
    pub fn ingress_drops(&self) -> u64 {
        self.drops.iter().filter(|(r, _)| **r != DropReason::Overflow).map(|(_, n)| n).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LogEvent {
    RxStart { t: u64, port: PortId, frame: usize, len: usize },
    RxEnd { t: u64, port: PortId, frame: usize },
    Verdict { t: u64, port: PortId, frame: usize, fcs: FcsVerdict },
    Decision { t: u64, port: PortId, frame: usize, mode: ActiveMode, kind: ForwardKind },
    ModeChange { t: u64, change: ModeChange },
    Drop { t: u64, port: PortId, frame: usize, reason: DropReason },
    TxBegin { t: u64, port: PortId, frame: usize },
    TxEnd { t: u64, port: PortId, frame: usize },
}

pub fn render_event(event: &LogEvent) -> String {
    fn kind(k: &ForwardKind) -> String {
        match k {
            ForwardKind::Unicast(p) => format!("unicast:{p}"),
            ForwardKind::Flood(ports) => {
                let list: Vec<String> = ports.iter().map(|p| p.to_string()).collect();
                format!("flood:{}", list.join(","))
            }
            ForwardKind::Discard(reason) => format!("discard:{reason}"),
        }
    }
    match event {
        LogEvent::RxStart { t, port, frame, len } => {
            format!("t={t}ns rx_start port={port} frame={frame} len={len}")
        }
        LogEvent::RxEnd { t, port, frame } => format!("t={t}ns rx_end port={port} frame={frame}"),
        LogEvent::Verdict { t, port, frame, fcs } => {
            format!("t={t}ns verdict port={port} frame={frame} fcs={fcs}")
        }
        LogEvent::Decision { t, port, frame, mode, kind: k } => {
            format!("t={t}ns decision port={port} frame={frame} mode={mode} action={}", kind(k))
        }
        LogEvent::ModeChange { t, change } => {
            format!("t={t}ns mode_change to={} bad={} of={}", change.to, change.bad, change.of)
        }
        LogEvent::Drop { t, port, frame, reason } => {
            format!("t={t}ns drop port={port} frame={frame} reason={reason}")
        }
        LogEvent::TxBegin { t, port, frame } => format!("t={t}ns tx_begin port={port} frame={frame}"),
        LogEvent::TxEnd { t, port, frame } => format!("t={t}ns tx_end port={port} frame={frame}"),
    }
}

#[derive(Debug)]
pub struct SimReport {
    pub ports: Vec<PortStats>,
    pub events: Vec<LogEvent>,
    pub switch_stats: Option<SwitchStats>,
    pub router_stats: Option<RouterStats>,
}

impl SimReport {
    /// The event log as text, one line per event, chronological.
    pub fn render_log(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&render_event(event));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug)]
enum Device {
    Switch(Switch),
    Router(Router),
}

#[derive(Debug, Clone, Copy)]
enum EngineEvent {
    RxStart { frame: usize },
    RxEnd { frame: usize },
    /// Switch sampling point: the header has arrived, pick the mode.
    CtPoint { frame: usize },
    DecideSf { frame: usize },
    DecideMalformed { frame: usize, mode: ActiveMode },
    CtComplete { frame: usize },
    DecideRoute { frame: usize },
    TxBegin { port: PortId },
    TxFinish { port: PortId, frame: usize },
}

#[derive(Debug, Default)]
struct EgressState {
    queue: VecDeque<(usize, usize)>,
    busy: bool,
    next_allowed: u64,
}

struct Sim {
    links: Vec<LinkModel>,
    tuning: SimTuning,
    device: Device,
    /// Frame bytes as they appear on the wire, corruption applied.
    wire: Vec<Vec<u8>>,
    ingress: Vec<PortId>,
    t_start: Vec<u64>,
    t_rx_end: Vec<u64>,
    proc_ns: Vec<u64>,
    ct_actions: Vec<Option<ForwardAction>>,
    egress: Vec<EgressState>,
    stats: Vec<PortStats>,
    log: Vec<LogEvent>,
    heap: BinaryHeap<Reverse<(u64, u64)>>,
    pending: Vec<EngineEvent>,
}

impl Sim {
    fn nspb(&self, port: PortId) -> u64 {
        self.links[port as usize].rate.ns_per_bit()
    }

    fn schedule(&mut self, t: u64, event: EngineEvent) {
        let seq = self.pending.len() as u64;
        self.pending.push(event);
        self.heap.push(Reverse((t, seq)));
    }

    fn stats_mut(&mut self, port: PortId) -> &mut PortStats {
        &mut self.stats[port as usize]
    }

    fn count_drop(&mut self, port: PortId, reason: DropReason) {
        *self.stats_mut(port).drops.entry(reason).or_insert(0) += 1;
    }

    fn handle(&mut self, t: u64, event: EngineEvent) {
        match event {
            EngineEvent::RxStart { frame } => {
                let port = self.ingress[frame];
                self.log.push(LogEvent::RxStart { t, port, frame, len: self.wire[frame].len() });
            }
            EngineEvent::RxEnd { frame } => {
                let port = self.ingress[frame];
                self.stats_mut(port).rx_frames += 1;
                self.log.push(LogEvent::RxEnd { t, port, frame });
            }
            EngineEvent::CtPoint { frame } => self.ct_point(t, frame),
            EngineEvent::DecideSf { frame } => self.decide_sf(t, frame),
            EngineEvent::DecideMalformed { frame, mode } => self.decide_malformed(t, frame, mode),
            EngineEvent::CtComplete { frame } => self.ct_complete(t, frame),
            EngineEvent::DecideRoute { frame } => self.decide_route(t, frame),
            EngineEvent::TxBegin { port } => self.tx_begin(t, port),
            EngineEvent::TxFinish { port, frame } => self.tx_finish(t, port, frame),
        }
    }

    fn switch_mut(&mut self) -> &mut Switch {
        match &mut self.device {
            Device::Switch(sw) => sw,
            Device::Router(_) => unreachable!("switch events only arise with a switch device"),
        }
    }

    fn size_bad(len: usize) -> bool {
        len < MIN_FRAME || len > MAX_FRAME
    }

    fn ct_point(&mut self, t: u64, frame: usize) {
        let port = self.ingress[frame];
        let t_sf = self.t_rx_end[frame] + self.proc_ns[frame];
        let mode = match &self.device {
            Device::Switch(sw) => sw.active_mode(),
            Device::Router(_) => unreachable!(),
        };
        if Self::size_bad(self.wire[frame].len()) {
            // The violation only shows at frame end, whatever the mode.
            self.schedule(t_sf.max(t), EngineEvent::DecideMalformed { frame, mode });
            return;
        }
        match mode {
            ActiveMode::CutThrough => {
                let header: Vec<u8> = self.wire[frame][..14].to_vec();
                let action = self.switch_mut().ct_decide(&header, port, t);
                self.log.push(LogEvent::Decision {
                    t,
                    port,
                    frame,
                    mode: ActiveMode::CutThrough,
                    kind: action.kind.clone(),
                });
                self.apply_kind(t, frame, port, &action.kind);
                self.ct_actions[frame] = Some(action);
                self.schedule(self.t_rx_end[frame].max(t), EngineEvent::CtComplete { frame });
            }
            ActiveMode::StoreForward => {
                self.schedule(t_sf.max(t), EngineEvent::DecideSf { frame });
            }
        }
    }

    fn decide_sf(&mut self, t: u64, frame: usize) {
        let port = self.ingress[frame];
        let raw = std::mem::take(&mut self.wire[frame]);
        let outcome = self.switch_mut().process_frame_store_forward(&raw, port, t);
        self.wire[frame] = raw;
        let verdict = outcome.verdict.expect("size was gated at the sampling point");
        self.log.push(LogEvent::Verdict { t, port, frame, fcs: verdict });
        if verdict == FcsVerdict::Bad {
            self.stats_mut(port).crc_errors += 1;
        }
        self.log.push(LogEvent::Decision {
            t,
            port,
            frame,
            mode: ActiveMode::StoreForward,
            kind: outcome.action.kind.clone(),
        });
        if let Some(change) = outcome.mode_change {
            self.log.push(LogEvent::ModeChange { t, change });
        }
        self.apply_kind(t, frame, port, &outcome.action.kind);
    }

    fn decide_malformed(&mut self, t: u64, frame: usize, mode: ActiveMode) {
        let port = self.ingress[frame];
        let outcome = self.switch_mut().reject_malformed(mode);
        self.count_drop(port, DropReason::Malformed);
        self.log.push(LogEvent::Decision { t, port, frame, mode, kind: outcome.action.kind });
    }

    fn ct_complete(&mut self, t: u64, frame: usize) {
        let port = self.ingress[frame];
        let action = self.ct_actions[frame].take().expect("stored at the dispatch point");
        let raw = std::mem::take(&mut self.wire[frame]);
        let (verdict, change) = self.switch_mut().ct_complete(&raw, port, t, &action);
        self.wire[frame] = raw;
        self.log.push(LogEvent::Verdict { t, port, frame, fcs: verdict });
        if verdict == FcsVerdict::Bad {
            let stats = self.stats_mut(port);
            stats.crc_errors += 1;
            if action.kind.is_forward() {
                stats.forwarded_bad_crc += 1;
            }
        }
        if let Some(change) = change {
            self.log.push(LogEvent::ModeChange { t, change });
        }
    }

    fn decide_route(&mut self, t: u64, frame: usize) {
        let port = self.ingress[frame];
        let raw = std::mem::take(&mut self.wire[frame]);
        let router = match &mut self.device {
            Device::Router(r) => r,
            Device::Switch(_) => unreachable!("route events only arise with a router device"),
        };
        let result = router.forward_packet(&raw, port);
        self.wire[frame] = raw;
        match result {
            Ok(routed) => {
                let kind = ForwardKind::Unicast(routed.egress);
                self.log.push(LogEvent::Decision {
                    t,
                    port,
                    frame,
                    mode: ActiveMode::StoreForward,
                    kind: kind.clone(),
                });
                self.stats_mut(port).forwarded += 1;
                self.enqueue(t, frame, routed.egress, routed.frame.len());
            }
            Err(reason) => {
                if reason == DropReason::CrcError {
                    self.stats_mut(port).crc_errors += 1;
                }
                self.count_drop(port, reason);
                self.log.push(LogEvent::Decision {
                    t,
                    port,
                    frame,
                    mode: ActiveMode::StoreForward,
                    kind: ForwardKind::Discard(reason),
                });
            }
        }
    }

    /// Per-port stats bookkeeping plus egress dispatch for one decision.
    fn apply_kind(&mut self, t: u64, frame: usize, port: PortId, kind: &ForwardKind) {
        match kind {
            ForwardKind::Unicast(q) => {
                self.stats_mut(port).forwarded += 1;
                self.enqueue(t, frame, *q, self.wire[frame].len());
            }
            ForwardKind::Flood(ports) => {
                let stats = self.stats_mut(port);
                stats.forwarded += 1;
                stats.floods += 1;
                for &q in ports {
                    self.enqueue(t, frame, q, self.wire[frame].len());
                }
            }
            ForwardKind::Discard(reason) => self.count_drop(port, *reason),
        }
    }

    fn enqueue(&mut self, t: u64, frame: usize, q: PortId, len: usize) {
        if self.egress[q as usize].queue.len() >= self.tuning.egress_queue_frames {
            self.count_drop(q, DropReason::Overflow);
            self.log.push(LogEvent::Drop { t, port: q, frame, reason: DropReason::Overflow });
            return;
        }
        let state = &mut self.egress[q as usize];
        state.queue.push_back((frame, len));
        if !state.busy {
            state.busy = true;
            let at = state.next_allowed.max(t);
            self.schedule(at, EngineEvent::TxBegin { port: q });
        }
    }

    fn tx_begin(&mut self, t: u64, q: PortId) {
        if t < self.egress[q as usize].next_allowed {
            self.stats[q as usize].ifg_violations += 1;
        }
        let (frame, len) = self.egress[q as usize].queue.pop_front().expect("tx follows an enqueue");
        self.log.push(LogEvent::TxBegin { t, port: q, frame });
        let ingress = self.ingress[frame];
        let in_nspb = self.nspb(ingress);
        let first_bit = (t - self.t_start[frame]) / in_nspb;
        self.stats_mut(ingress).latencies.push(LatencyRecord { frame, egress: q, first_bit, last_bit: 0 });
        let t_end = t + (PREAMBLE_OCTETS + len as u64) * 8 * self.nspb(q);
        self.schedule(t_end, EngineEvent::TxFinish { port: q, frame });
    }

    fn tx_finish(&mut self, t: u64, q: PortId, frame: usize) {
        self.stats_mut(q).tx_frames += 1;
        self.log.push(LogEvent::TxEnd { t, port: q, frame });
        let ingress = self.ingress[frame];
        let last_bit = (t - self.t_start[frame]) / self.nspb(ingress);
        let record = self.stats_mut(ingress)
            .latencies
            .iter_mut()
            .find(|r| r.frame == frame && r.egress == q && r.last_bit == 0)
            .expect("opened at transmit start");
        record.last_bit = last_bit;
        let ifg_ns = self.links[q as usize].ifg_bits * self.nspb(q);
        let state = &mut self.egress[q as usize];
        state.next_allowed = t + ifg_ns;
        if state.queue.is_empty() {
            state.busy = false;
        } else {
            let at = state.next_allowed;
            self.schedule(at, EngineEvent::TxBegin { port: q });
        }
    }
}

fn rx_bits(len: usize) -> u64 {
    (PREAMBLE_OCTETS + len as u64) * 8
}

fn validate_schedule(links: &[LinkModel], schedule: &[TimedFrame]) -> Result<(), SimError> {
    let mut per_port: BTreeMap<PortId, Vec<(u64, u64)>> = BTreeMap::new();
    for item in schedule {
        if item.port as usize >= links.len() {
            return Err(SimError::UnknownPort { port: item.port, ports: links.len() });
        }
        per_port.entry(item.port).or_default().push((item.arrival_start, rx_bits(item.frame.len())));
    }
    for (port, mut arrivals) in per_port {
        arrivals.sort_unstable();
        let ifg = links[port as usize].ifg_bits;
        for pair in arrivals.windows(2) {
            let (first, bits) = pair[0];
            let (second, _) = pair[1];
            if second < first + bits + ifg {
                return Err(SimError::ScheduleOverlap { port, first, second });
            }
        }
    }
    Ok(())
}

/// Applies error injection, drawing random bit positions from the seed in
/// schedule order.
fn wire_bytes(schedule: &[TimedFrame], seed: u64) -> Result<Vec<Vec<u8>>, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    schedule
        .iter()
        .map(|item| match item.corrupt {
            None => Ok(item.frame.clone()),
            Some(CorruptSpec::Bit(index)) => Ok(inject_error(&item.frame, index)?),
            Some(CorruptSpec::Random) => {
                let bits = item.frame.len() as u64 * 8;
                if bits == 0 {
                    return Err(IndexOutOfRange { index: 0, bits }.into());
                }
                let index = rng.random_range(0..bits);
                Ok(inject_error(&item.frame, index).expect("index drawn in range"))
            }
        })
        .collect()
}

pub fn run_simulation(config: SimConfig, schedule: &[TimedFrame], seed: u64) -> Result<SimReport, SimError> {
    let SimConfig { links, device, tuning } = config;
    let device = match device {
        DeviceSpec::Switch(cfg) => {
            if cfg.ports as usize != links.len() {
                return Err(SimError::PortCountMismatch {
                    device_ports: cfg.ports,
                    link_ports: links.len(),
                });
            }
            Device::Switch(Switch::new(cfg)?)
        }
        DeviceSpec::Router(router) => {
            for entry in router.routes().entries() {
                if entry.egress as usize >= links.len() {
                    return Err(SimError::UnknownEgress { port: entry.egress, ports: links.len() });
                }
            }
            Device::Router(router)
        }
    };
    validate_schedule(&links, schedule)?;
    let wire = wire_bytes(schedule, seed)?;

    let n = schedule.len();
    let mut sim = Sim {
        egress: (0..links.len()).map(|_| EgressState::default()).collect(),
        stats: vec![PortStats::default(); links.len()],
        links,
        tuning,
        device,
        wire,
        ingress: schedule.iter().map(|i| i.port).collect(),
        t_start: Vec::with_capacity(n),
        t_rx_end: Vec::with_capacity(n),
        proc_ns: Vec::with_capacity(n),
        ct_actions: vec![None; n],
        log: Vec::new(),
        heap: BinaryHeap::new(),
        pending: Vec::new(),
    };
    for (frame, item) in schedule.iter().enumerate() {
        let nspb = sim.nspb(item.port);
        let t_start = item.arrival_start * nspb;
        let t_rx_end = t_start + rx_bits(sim.wire[frame].len()) * nspb;
        let proc = sim.tuning.pipeline_ticks * sim.tuning.bits_per_tick * nspb;
        sim.t_start.push(t_start);
        sim.t_rx_end.push(t_rx_end);
        sim.proc_ns.push(proc);
        sim.schedule(t_start, EngineEvent::RxStart { frame });
        sim.schedule(t_rx_end, EngineEvent::RxEnd { frame });
        match sim.device {
            Device::Switch(_) => {
                let t_ct = t_start + (PREAMBLE_OCTETS + sim.tuning.ct_dispatch_bytes) * 8 * nspb + proc;
                sim.schedule(t_ct, EngineEvent::CtPoint { frame });
            }
            Device::Router(_) => {
                sim.schedule(t_rx_end + proc, EngineEvent::DecideRoute { frame });
            }
        }
    }
    while let Some(Reverse((t, seq))) = sim.heap.pop() {
        let event = sim.pending[seq as usize];
        sim.handle(t, event);
    }
    let (switch_stats, router_stats) = match &sim.device {
        Device::Switch(sw) => (Some(sw.stats().clone()), None),
        Device::Router(r) => (None, Some(r.stats().clone())),
    };
    Ok(SimReport { ports: sim.stats, events: sim.log, switch_stats, router_stats })
}
