//! `ethpipe`: decode frame files, check their FCS, replay traces through
//! a switch or router, and run fabric simulations. Every subcommand
//! builds one report tree and prints it either as `key=value` lines or,
//! with `--json`, as a JSON document carrying exactly the same fields.
//! Exit codes: 0 success, 1 input error, 2 usage error.

use std::env;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::{json, Map, Value};
use thiserror::Error;

use ethpipe::crc32::{append_fcs, crc32_compute, fcs_verify, FcsVerdict};
use ethpipe::io::config::{load_router_config, load_scenario, load_switch_config, ConfigError, ScenarioError};
use ethpipe::io::hexdump::{read_hexdump, HexDumpError};
use ethpipe::io::pcap::{read_capture, PcapError};
use ethpipe::io::trace::{read_trace, TraceError, TraceEntry};
use ethpipe::parse::{extract_metadata, L2Class, ParsedPacket};
use ethpipe::router::Router;
use ethpipe::sim::{run_simulation, PortStats, SimError, SimReport};
use ethpipe::switch::{ForwardKind, ModeChange, Switch, SwitchConfigError};
use ethpipe::types::PortId;

#[derive(Parser)]
#[command(name = "ethpipe", version, about = "Ethernet frame tooling: decode, crc, switch, route, sim")]
struct Cli {
    /// Print one JSON document instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode frames from a file and print their parsed fields.
    Decode(InputArgs),
    /// Print per-frame FCS status.
    Crc(InputArgs),
    /// Replay a trace through a switch.
    Switch {
        /// Switch config file (`key value` lines).
        #[arg(long)]
        config: PathBuf,
        /// Trace file (`<port> <time_us> <octet>…` lines).
        #[arg(long)]
        trace: PathBuf,
    },
    /// Replay a trace through a router.
    Route {
        /// Router config file (`[ports]` / `[routes]` / `[neighbors]`).
        #[arg(long)]
        config: PathBuf,
        /// Trace file (`<port> <time_us> <octet>…` lines).
        #[arg(long)]
        trace: PathBuf,
    },
    /// Run a fabric simulation from a scenario file.
    Sim {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// Seed for scheduled random corruption.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Frame file: `.pcap` reads as a capture, anything else as a hex dump.
    file: PathBuf,
    /// Capture frames carry their FCS (captures default to lacking it).
    #[arg(long)]
    has_fcs: bool,
    /// Hex-dump frames lack their FCS (dumps default to carrying it).
    #[arg(long, conflicts_with = "has_fcs")]
    no_fcs: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}: {source}")]
    Capture {
        path: String,
        #[source]
        source: PcapError,
    },
    #[error("{path}: {source}")]
    HexDump {
        path: String,
        #[source]
        source: HexDumpError,
    },
    #[error("{path}: {source}")]
    Trace {
        path: String,
        #[source]
        source: TraceError,
    },
    #[error("{path}: {source}")]
    Config {
        path: String,
        #[source]
        source: ConfigError,
    },
    #[error("{path}: {source}")]
    Scenario {
        path: String,
        #[source]
        source: ScenarioError,
    },
    #[error(transparent)]
    Switch(#[from] SwitchConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Input(String),
}

fn main() -> ExitCode {
    let styled = env::var_os("ETHPIPE_COLOR").is_none_or(|v| v != "0");
    let color = if styled { clap::ColorChoice::Auto } else { clap::ColorChoice::Never };
    let matches = Cli::command().color(color).get_matches();
    let cli = Cli::from_arg_matches(&matches).expect("the parser built these matches");

    match run(&cli.command) {
        Ok(report) => {
            let text = if cli.json {
                let mut doc =
                    serde_json::to_string_pretty(&report).expect("reports are plain trees");
                doc.push('\n');
                doc
            } else {
                let mut lines = Vec::new();
                flatten("", &report, &mut lines);
                lines.iter().fold(String::new(), |mut acc, line| {
                    acc.push_str(line);
                    acc.push('\n');
                    acc
                })
            };
            emit(&text)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

/// Writes the report in one piece. A closed pipe (`ethpipe … | head`) is
/// a normal way to stop reading, not an error.
fn emit(text: &str) -> ExitCode {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if err.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(command: &Command) -> Result<Value, CliError> {
    match command {
        Command::Decode(input) => {
            let (frames, fcs_present) = load_frames(input)?;
            let rows: Vec<Value> =
                frames.iter().enumerate().map(|(i, f)| decode_row(i, f, fcs_present)).collect();
            Ok(json!({ "frames": rows }))
        }
        Command::Crc(input) => {
            let (frames, fcs_present) = load_frames(input)?;
            let rows: Vec<Value> =
                frames.iter().enumerate().map(|(i, f)| crc_row(i, f, fcs_present)).collect();
            Ok(json!({ "frames": rows }))
        }
        Command::Switch { config, trace } => {
            let file = load_switch_config(config).map_err(|source| CliError::Config {
                path: config.display().to_string(),
                source,
            })?;
            let entries = read_trace(trace).map_err(|source| CliError::Trace {
                path: trace.display().to_string(),
                source,
            })?;
            replay_switch(&file.to_config(1_000_000), &entries)
        }
        Command::Route { config, trace } => {
            let router = load_router_config(config).map_err(|source| CliError::Config {
                path: config.display().to_string(),
                source,
            })?;
            let entries = read_trace(trace).map_err(|source| CliError::Trace {
                path: trace.display().to_string(),
                source,
            })?;
            Ok(replay_route(router, &entries))
        }
        Command::Sim { scenario, seed } => {
            let (config, schedule) = load_scenario(scenario).map_err(|source| CliError::Scenario {
                path: scenario.display().to_string(),
                source,
            })?;
            let report = run_simulation(config, &schedule, *seed)?;
            Ok(sim_value(&report, *seed))
        }
    }
}

/// Reads the input file and says whether its frames carry an FCS.
fn load_frames(input: &InputArgs) -> Result<(Vec<Vec<u8>>, bool), CliError> {
    let is_capture = input
        .file
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pcap"));
    if is_capture {
        let records = read_capture(&input.file).map_err(|source| CliError::Capture {
            path: input.file.display().to_string(),
            source,
        })?;
        Ok((records.into_iter().map(|r| r.frame).collect(), input.has_fcs))
    } else {
        let frames = read_hexdump(&input.file).map_err(|source| CliError::HexDump {
            path: input.file.display().to_string(),
            source,
        })?;
        Ok((frames, !input.no_fcs))
    }
}

fn hex16(value: u16) -> String {
    format!("0x{value:04x}")
}

fn hex32(value: u32) -> String {
    format!("0x{value:08x}")
}

fn meta_fields(row: &mut Map<String, Value>, meta: &ParsedPacket) {
    row.insert("dst".into(), meta.dst_mac.to_string().into());
    row.insert("src".into(), meta.src_mac.to_string().into());
    let (l2, field, raw) = match meta.l2 {
        L2Class::EthernetII { ethertype } => ("ethernet_ii", "ethertype", ethertype),
        L2Class::Ieee8023 { length } => ("ieee8023", "length", length),
        L2Class::Malformed { length_type } => ("malformed", "length_type", length_type),
    };
    row.insert("l2".into(), l2.into());
    row.insert(field.into(), hex16(raw).into());
    if let Some(ip) = &meta.ip {
        row.insert(
            "ip".into(),
            json!({
                "src": ip.src.to_string(),
                "dst": ip.dst.to_string(),
                "protocol": ip.protocol,
                "ttl": ip.ttl,
                "checksum_valid": ip.checksum_valid,
            }),
        );
    }
    if let Some(l4) = &meta.l4 {
        row.insert(
            "l4".into(),
            json!({ "src_port": l4.src_port, "dst_port": l4.dst_port }),
        );
    }
}

fn decode_row(index: usize, raw: &[u8], fcs_present: bool) -> Value {
    let mut row = Map::new();
    row.insert("frame".into(), index.into());
    row.insert("len".into(), raw.len().into());
    let parsed = if fcs_present {
        extract_metadata(raw, true).map(|meta| {
            let verdict = meta.fcs;
            (meta, verdict.as_str(), u32::from_le_bytes(raw[raw.len() - 4..].try_into().unwrap()))
        })
    } else {
        let full = append_fcs(raw);
        extract_metadata(&full, false)
            .map(|meta| (meta, "recomputed", crc32_compute(raw)))
    };
    match parsed {
        Ok((meta, fcs, fcs_value)) => {
            meta_fields(&mut row, &meta);
            row.insert("fcs".into(), fcs.into());
            row.insert("fcs_value".into(), hex32(fcs_value).into());
        }
        Err(err) => {
            row.insert("error".into(), err.to_string().into());
        }
    }
    Value::Object(row)
}

fn crc_row(index: usize, raw: &[u8], fcs_present: bool) -> Value {
    let mut row = Map::new();
    row.insert("frame".into(), index.into());
    row.insert("len".into(), raw.len().into());
    if fcs_present {
        match fcs_verify(raw) {
            Ok(verdict) => {
                let body = &raw[..raw.len() - 4];
                row.insert("computed".into(), hex32(crc32_compute(body)).into());
                row.insert(
                    "stored".into(),
                    hex32(u32::from_le_bytes(raw[raw.len() - 4..].try_into().unwrap())).into(),
                );
                row.insert("fcs".into(), verdict.as_str().into());
            }
            Err(err) => {
                row.insert("error".into(), err.to_string().into());
            }
        }
    } else {
        row.insert("computed".into(), hex32(crc32_compute(raw)).into());
        row.insert("fcs".into(), "recomputed".into());
    }
    Value::Object(row)
}

fn action_text(kind: &ForwardKind) -> String {
    match kind {
        ForwardKind::Unicast(port) => format!("unicast:{port}"),
        ForwardKind::Flood(ports) => {
            let list: Vec<String> = ports.iter().map(|p| p.to_string()).collect();
            format!("flood:{}", list.join(","))
        }
        ForwardKind::Discard(reason) => format!("discard:{reason}"),
    }
}

fn mode_change_value(change: &ModeChange) -> Value {
    json!({ "to": change.to.to_string(), "bad": change.bad, "of": change.of })
}

fn drops_value(drops: &std::collections::BTreeMap<ethpipe::types::DropReason, u64>) -> Value {
    Value::Object(drops.iter().map(|(reason, n)| (reason.to_string(), (*n).into())).collect())
}

fn replay_switch(config: &ethpipe::switch::SwitchConfig, entries: &[TraceEntry]) -> Result<Value, CliError> {
    let ports = config.ports;
    let mut switch = Switch::new(config.clone())?;
    let mut rows = Vec::with_capacity(entries.len());
    let mut rx = vec![0u64; ports as usize];
    let mut tx = vec![0u64; ports as usize];
    for (i, entry) in entries.iter().enumerate() {
        if entry.port >= ports {
            return Err(CliError::Input(format!(
                "trace frame {i} arrives on port {} but the switch has {ports} ports",
                entry.port
            )));
        }
        let outcome = switch.process_frame(&entry.frame, entry.port, entry.t_us);
        rx[entry.port as usize] += 1;
        for &port in outcome.action.kind.ports() {
            tx[port as usize] += 1;
        }
        let mut row = Map::new();
        row.insert("frame".into(), i.into());
        row.insert("t_us".into(), entry.t_us.into());
        row.insert("port".into(), entry.port.into());
        row.insert("mode".into(), outcome.action.mode_used.to_string().into());
        row.insert("action".into(), action_text(&outcome.action.kind).into());
        row.insert(
            "fcs".into(),
            outcome.verdict.unwrap_or(FcsVerdict::Unchecked).as_str().into(),
        );
        if let Some(change) = &outcome.mode_change {
            row.insert("mode_change".into(), mode_change_value(change));
        }
        rows.push(Value::Object(row));
    }

    let stats = switch.stats();
    let port_rows: Vec<Value> = (0..ports as usize)
        .map(|p| json!({ "port": p, "rx_frames": rx[p], "tx_copies": tx[p] }))
        .collect();
    Ok(json!({
        "frames": rows,
        "ports": port_rows,
        "switch": {
            "frames": stats.frames,
            "unicasts": stats.unicasts,
            "floods": stats.floods,
            "discards": drops_value(&stats.discards),
            "forwarded_bad_crc": stats.forwarded_bad_crc,
            "malformed_sources": stats.malformed_sources,
            "sf_entries": stats.sf_entries,
            "sf_exits": stats.sf_exits,
        },
    }))
}

fn replay_route(mut router: Router, entries: &[TraceEntry]) -> Value {
    let mut ports: Vec<PortId> = router.ports().map(|(port, _)| *port).collect();
    ports.sort_unstable();
    let mut rx: std::collections::BTreeMap<PortId, u64> = Default::default();
    let mut tx: std::collections::BTreeMap<PortId, u64> = Default::default();
    let mut rows = Vec::with_capacity(entries.len());
    for (i, entry) in entries.iter().enumerate() {
        let mut row = Map::new();
        row.insert("frame".into(), i.into());
        row.insert("t_us".into(), entry.t_us.into());
        row.insert("port".into(), entry.port.into());
        *rx.entry(entry.port).or_default() += 1;
        match router.forward_packet(&entry.frame, entry.port) {
            Ok(routed) => {
                row.insert("action".into(), format!("forward:{}", routed.egress).into());
                *tx.entry(routed.egress).or_default() += 1;
            }
            Err(reason) => {
                row.insert("action".into(), format!("drop:{reason}").into());
            }
        }
        rows.push(Value::Object(row));
    }

    for port in rx.keys().chain(tx.keys()) {
        if !ports.contains(port) {
            ports.push(*port);
        }
    }
    ports.sort_unstable();
    let port_rows: Vec<Value> = ports
        .iter()
        .map(|p| {
            json!({
                "port": p,
                "rx_frames": rx.get(p).copied().unwrap_or(0),
                "tx_frames": tx.get(p).copied().unwrap_or(0),
            })
        })
        .collect();
    let stats = router.stats();
    json!({
        "frames": rows,
        "ports": port_rows,
        "router": {
            "frames": stats.frames,
            "forwarded": stats.forwarded,
            "drops": drops_value(&stats.drops),
        },
    })
}

fn port_value(port: usize, stats: &PortStats) -> Value {
    let mut row = Map::new();
    row.insert("port".into(), port.into());
    row.insert("rx_frames".into(), stats.rx_frames.into());
    row.insert("tx_frames".into(), stats.tx_frames.into());
    row.insert("crc_errors".into(), stats.crc_errors.into());
    row.insert("forwarded".into(), stats.forwarded.into());
    row.insert("forwarded_bad_crc".into(), stats.forwarded_bad_crc.into());
    row.insert("floods".into(), stats.floods.into());
    row.insert("drops".into(), drops_value(&stats.drops));
    row.insert("ifg_violations".into(), stats.ifg_violations.into());
    let firsts: Vec<u64> = stats.latencies.iter().map(|l| l.first_bit).collect();
    let latency = if firsts.is_empty() {
        json!({ "copies": 0 })
    } else {
        let sum: u64 = firsts.iter().sum();
        json!({
            "copies": firsts.len(),
            "min_bits": firsts.iter().min().unwrap(),
            "mean_bits": format!("{:.1}", sum as f64 / firsts.len() as f64),
            "max_bits": firsts.iter().max().unwrap(),
        })
    };
    row.insert("latency".into(), latency);
    Value::Object(row)
}

fn sim_value(report: &SimReport, seed: u64) -> Value {
    let mut root = Map::new();
    root.insert("seed".into(), seed.into());
    let events: Vec<Value> =
        report.events.iter().map(|e| ethpipe::sim::render_event(e).into()).collect();
    root.insert("events".into(), events.into());
    let ports: Vec<Value> =
        report.ports.iter().enumerate().map(|(p, s)| port_value(p, s)).collect();
    root.insert("ports".into(), ports.into());
    if let Some(stats) = &report.switch_stats {
        root.insert(
            "switch".into(),
            json!({
                "frames": stats.frames,
                "unicasts": stats.unicasts,
                "floods": stats.floods,
                "discards": drops_value(&stats.discards),
                "forwarded_bad_crc": stats.forwarded_bad_crc,
                "malformed_sources": stats.malformed_sources,
                "sf_entries": stats.sf_entries,
                "sf_exits": stats.sf_exits,
            }),
        );
    }
    if let Some(stats) = &report.router_stats {
        root.insert(
            "router".into(),
            json!({
                "frames": stats.frames,
                "forwarded": stats.forwarded,
                "drops": drops_value(&stats.drops),
            }),
        );
    }
    Value::Object(root)
}

/// Renders a report tree as `key=value` lines, one scalar per line, with
/// dotted paths and numeric indices. The same tree prints under `--json`,
/// so both surfaces carry identical fields.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            if map.is_empty() {
                out.push(format!("{prefix}="));
                return;
            }
            for (key, child) in map {
                let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                flatten(&path, child, out);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push(format!("{prefix}="));
                return;
            }
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), child, out);
            }
        }
        Value::String(s) => out.push(format!("{prefix}={s}")),
        other => out.push(format!("{prefix}={other}")),
    }
}
