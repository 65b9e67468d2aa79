//! Device configuration files: `key value` lines for the switch, a
//! sectioned line format for the router, and a TOML scenario that binds
//! a device, its links, and an arrival schedule for the simulator.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::net::Ipv4Addr;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::ethernet::MacAddr;
use crate::io::hexdump::{parse_hexdump, read_hexdump, HexDumpError};
use crate::router::{RouteEntry, Router};
use crate::sim::{
    CorruptSpec, DeviceSpec, LinkModel, LinkRate, SimConfig, SimTuning, TimedFrame, NS_PER_SEC,
};
use crate::switch::{SwitchConfig, SwitchMode};
use crate::switch::{DEFAULT_AGING_SECS, DEFAULT_ENTER_SF, DEFAULT_EXIT_SF, DEFAULT_WINDOW};
use crate::types::PortId;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Bad { line: usize, msg: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn bad(line: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::Bad { line, msg: msg.into() }
}

/// Switch settings as written in a config file. Aging is stored in
/// seconds here; `to_config` scales it onto whatever clock the caller
/// runs (microsecond trace replay, nanosecond simulation).
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchConfigFile {
    pub ports: u32,
    pub mode: SwitchMode,
    pub window: usize,
    pub enter_sf: f64,
    pub exit_sf: f64,
    pub aging_secs: u64,
}

impl SwitchConfigFile {
    pub fn to_config(&self, ticks_per_sec: u64) -> SwitchConfig {
        SwitchConfig {
            ports: self.ports,
            mode: self.mode,
            window: self.window,
            enter_sf: self.enter_sf,
            exit_sf: self.exit_sf,
            aging_limit: self.aging_secs * ticks_per_sec,
        }
    }
}

/// Parses `key value` lines: `ports` and `mode` are required; `window`,
/// `enter_sf`, `exit_sf`, and `aging_secs` default. `#` starts a comment.
pub fn parse_switch_config(text: &str) -> Result<SwitchConfigFile, ConfigError> {
    let mut ports: Option<u32> = None;
    let mut mode: Option<SwitchMode> = None;
    let mut window: Option<usize> = None;
    let mut enter_sf: Option<f64> = None;
    let mut exit_sf: Option<f64> = None;
    let mut aging_secs: Option<u64> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 2 {
            return Err(bad(line, "expected `<key> <value>`"));
        }
        let (key, value) = (fields[0], fields[1]);

        fn put<T>(line: usize, key: &str, slot: &mut Option<T>, value: T) -> Result<(), ConfigError> {
            if slot.is_some() {
                return Err(bad(line, format!("`{key}` appears twice")));
            }
            *slot = Some(value);
            Ok(())
        }
        fn num<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse().map_err(|_| bad(line, format!("`{value}` is not a valid `{key}`")))
        }

        match key {
            "ports" => put(line, key, &mut ports, num(line, key, value)?)?,
            "mode" => {
                let parsed = SwitchMode::from_name(value)
                    .ok_or_else(|| bad(line, format!("`{value}` is not sf, ct, or hybrid")))?;
                put(line, key, &mut mode, parsed)?;
            }
            "window" => put(line, key, &mut window, num(line, key, value)?)?,
            "enter_sf" => put(line, key, &mut enter_sf, num(line, key, value)?)?,
            "exit_sf" => put(line, key, &mut exit_sf, num(line, key, value)?)?,
            "aging_secs" => put(line, key, &mut aging_secs, num(line, key, value)?)?,
            _ => return Err(bad(line, format!("unknown key `{key}`"))),
        }
    }

    Ok(SwitchConfigFile {
        ports: ports.ok_or(ConfigError::Missing("ports"))?,
        mode: mode.ok_or(ConfigError::Missing("mode"))?,
        window: window.unwrap_or(DEFAULT_WINDOW),
        enter_sf: enter_sf.unwrap_or(DEFAULT_ENTER_SF),
        exit_sf: exit_sf.unwrap_or(DEFAULT_EXIT_SF),
        aging_secs: aging_secs.unwrap_or(DEFAULT_AGING_SECS),
    })
}

pub fn load_switch_config(path: impl AsRef<Path>) -> Result<SwitchConfigFile, ConfigError> {
    parse_switch_config(&fs::read_to_string(path)?)
}

/// Builds a router from one sectioned file. `[ports]` lines read
/// `<port> <mac>`, `[routes]` lines `<prefix>/<len> <next_hop_ip|direct>
/// <port>`, and `[neighbors]` lines `<ip> <mac> <port>`.
pub fn parse_router_config(text: &str) -> Result<Router, ConfigError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Section {
        None,
        Ports,
        Routes,
        Neighbors,
    }

    let mut router = Router::new();
    let mut section = Section::None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        match body {
            "[ports]" => {
                section = Section::Ports;
                continue;
            }
            "[routes]" => {
                section = Section::Routes;
                continue;
            }
            "[neighbors]" => {
                section = Section::Neighbors;
                continue;
            }
            _ if body.starts_with('[') => {
                return Err(bad(line, format!("unknown section `{body}`")));
            }
            _ => {}
        }

        let fields: Vec<&str> = body.split_whitespace().collect();
        let port = |token: &str| -> Result<PortId, ConfigError> {
            token.parse().map_err(|_| bad(line, format!("`{token}` is not a port number")))
        };
        let mac = |token: &str| -> Result<MacAddr, ConfigError> {
            token.parse().map_err(|_| bad(line, format!("`{token}` is not a MAC address")))
        };
        let ip = |token: &str| -> Result<Ipv4Addr, ConfigError> {
            token.parse().map_err(|_| bad(line, format!("`{token}` is not an IPv4 address")))
        };

        match section {
            Section::None => return Err(bad(line, "entry before any section header")),
            Section::Ports => {
                if fields.len() != 2 {
                    return Err(bad(line, "expected `<port> <mac>`"));
                }
                router.set_port_mac(port(fields[0])?, mac(fields[1])?);
            }
            Section::Routes => {
                if fields.len() != 3 {
                    return Err(bad(line, "expected `<prefix>/<len> <next_hop_ip|direct> <port>`"));
                }
                let (prefix_text, len_text) = fields[0]
                    .split_once('/')
                    .ok_or_else(|| bad(line, format!("`{}` is not `<prefix>/<len>`", fields[0])))?;
                let prefix = ip(prefix_text)?;
                let prefix_len: u8 = len_text
                    .parse()
                    .map_err(|_| bad(line, format!("`{len_text}` is not a prefix length")))?;
                let next_hop = if fields[1] == "direct" { None } else { Some(ip(fields[1])?) };
                let entry = RouteEntry { prefix, prefix_len, next_hop, egress: port(fields[2])? };
                router.add_route(entry).map_err(|e| bad(line, e.to_string()))?;
            }
            Section::Neighbors => {
                if fields.len() != 3 {
                    return Err(bad(line, "expected `<ip> <mac> <port>`"));
                }
                router.add_neighbor(ip(fields[0])?, mac(fields[1])?, port(fields[2])?);
            }
        }
    }
    Ok(router)
}

pub fn load_router_config(path: impl AsRef<Path>) -> Result<Router, ConfigError> {
    parse_router_config(&fs::read_to_string(path)?)
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{0}")]
    Bad(String),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("device config: {0}")]
    Device(#[from] ConfigError),
    #[error(transparent)]
    Hex(#[from] HexDumpError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn bad_scenario(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Bad(msg.into())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    device: DeviceDoc,
    #[serde(default)]
    sim: TuningDoc,
    links: LinksDoc,
    #[serde(default)]
    schedule: Vec<ScheduleDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceDoc {
    kind: String,
    ports: Option<u32>,
    mode: Option<String>,
    window: Option<usize>,
    enter_sf: Option<f64>,
    exit_sf: Option<f64>,
    aging_secs: Option<u64>,
    config: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TuningDoc {
    pipeline_ticks: Option<u64>,
    bits_per_tick: Option<u64>,
    ct_dispatch_bytes: Option<u64>,
    egress_queue_frames: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinksDoc {
    rates: Vec<String>,
    ifg_bits: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    port: PortId,
    t: u64,
    frame: Option<String>,
    file: Option<String>,
    index: Option<usize>,
    corrupt_bit: Option<u64>,
    corrupt: Option<String>,
}

fn device_from_doc(doc: &DeviceDoc, base: &Path) -> Result<DeviceSpec, ScenarioError> {
    match doc.kind.as_str() {
        "switch" => {
            if doc.config.is_some() {
                return Err(bad_scenario("`device.config` only applies to a router"));
            }
            let ports = doc.ports.ok_or_else(|| bad_scenario("a switch needs `device.ports`"))?;
            let mode_name =
                doc.mode.as_deref().ok_or_else(|| bad_scenario("a switch needs `device.mode`"))?;
            let mode = SwitchMode::from_name(mode_name)
                .ok_or_else(|| bad_scenario(format!("`{mode_name}` is not sf, ct, or hybrid")))?;
            Ok(DeviceSpec::Switch(SwitchConfig {
                ports,
                mode,
                window: doc.window.unwrap_or(DEFAULT_WINDOW),
                enter_sf: doc.enter_sf.unwrap_or(DEFAULT_ENTER_SF),
                exit_sf: doc.exit_sf.unwrap_or(DEFAULT_EXIT_SF),
                aging_limit: doc.aging_secs.unwrap_or(DEFAULT_AGING_SECS) * NS_PER_SEC,
            }))
        }
        "router" => {
            for (set, key) in [
                (doc.ports.is_some(), "ports"),
                (doc.mode.is_some(), "mode"),
                (doc.window.is_some(), "window"),
                (doc.enter_sf.is_some(), "enter_sf"),
                (doc.exit_sf.is_some(), "exit_sf"),
                (doc.aging_secs.is_some(), "aging_secs"),
            ] {
                if set {
                    return Err(bad_scenario(format!("`device.{key}` only applies to a switch")));
                }
            }
            let config =
                doc.config.as_deref().ok_or_else(|| bad_scenario("a router needs `device.config`"))?;
            Ok(DeviceSpec::Router(load_router_config(base.join(config))?))
        }
        other => Err(bad_scenario(format!("unknown device kind `{other}`"))),
    }
}

fn frame_from_doc(
    entry: &ScheduleDoc,
    at: usize,
    base: &Path,
    files: &mut BTreeMap<String, Vec<Vec<u8>>>,
) -> Result<Vec<u8>, ScenarioError> {
    match (&entry.frame, &entry.file) {
        (Some(hex), None) => {
            if entry.index.is_some() {
                return Err(bad_scenario(format!("schedule entry {at}: `index` needs `file`")));
            }
            let mut frames = parse_hexdump(hex)?;
            if frames.len() != 1 {
                return Err(bad_scenario(format!(
                    "schedule entry {at}: inline hex holds {} frames, wanted one",
                    frames.len()
                )));
            }
            Ok(frames.pop().unwrap())
        }
        (None, Some(file)) => {
            if !files.contains_key(file) {
                files.insert(file.clone(), read_hexdump(base.join(file))?);
            }
            let frames = &files[file];
            let index = entry.index.unwrap_or(0);
            frames.get(index).cloned().ok_or_else(|| {
                bad_scenario(format!(
                    "schedule entry {at}: `{file}` holds {} frames, index {index} is out of range",
                    frames.len()
                ))
            })
        }
        _ => Err(bad_scenario(format!("schedule entry {at}: give exactly one of `frame` or `file`"))),
    }
}

/// Reads a scenario file and everything it references. Relative paths
/// resolve against the scenario's directory. Schedule order is kept, so
/// seeded corruption draws land on the same frames every run.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<(SimConfig, Vec<TimedFrame>), ScenarioError> {
    let path = path.as_ref();
    let doc: ScenarioDoc = toml::from_str(&fs::read_to_string(path)?)?;
    let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();

    let mut links = Vec::with_capacity(doc.links.rates.len());
    for rate in &doc.links.rates {
        let rate = LinkRate::from_str(rate)
            .ok_or_else(|| bad_scenario(format!("unknown link rate `{rate}`")))?;
        let mut link = LinkModel::new(rate);
        if let Some(ifg) = doc.links.ifg_bits {
            link.ifg_bits = ifg;
        }
        links.push(link);
    }

    let device = device_from_doc(&doc.device, &base)?;

    let defaults = SimTuning::default();
    let tuning = SimTuning {
        pipeline_ticks: doc.sim.pipeline_ticks.unwrap_or(defaults.pipeline_ticks),
        bits_per_tick: doc.sim.bits_per_tick.unwrap_or(defaults.bits_per_tick),
        ct_dispatch_bytes: doc.sim.ct_dispatch_bytes.unwrap_or(defaults.ct_dispatch_bytes),
        egress_queue_frames: doc.sim.egress_queue_frames.unwrap_or(defaults.egress_queue_frames),
    };

    let mut files: BTreeMap<String, Vec<Vec<u8>>> = BTreeMap::new();
    let mut schedule = Vec::with_capacity(doc.schedule.len());
    for (at, entry) in doc.schedule.iter().enumerate() {
        let frame = frame_from_doc(entry, at, &base, &mut files)?;
        let corrupt = match (entry.corrupt_bit, entry.corrupt.as_deref()) {
            (Some(bit), None) => Some(CorruptSpec::Bit(bit)),
            (None, Some("random")) => Some(CorruptSpec::Random),
            (None, Some(other)) => {
                return Err(bad_scenario(format!(
                    "schedule entry {at}: unknown corrupt spec `{other}`"
                )));
            }
            (None, None) => None,
            (Some(_), Some(_)) => {
                return Err(bad_scenario(format!(
                    "schedule entry {at}: give one of `corrupt_bit` or `corrupt`"
                )));
            }
        };
        schedule.push(TimedFrame { frame, arrival_start: entry.t, port: entry.port, corrupt });
    }

    Ok((SimConfig { links, device, tuning }, schedule))
}
