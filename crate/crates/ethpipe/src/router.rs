//! IPv4 forwarding plane: strip the L2 wrapper, longest-prefix-match the
//! destination, decrement the TTL, and re-wrap with the next hop's
//! addresses. Failures come back as [`DropReason`] data, one reason per
//! frame, reported in a fixed check order.

use std::collections::BTreeMap;
use std::net::Ipv4Addr;

use thiserror::Error;

use crate::crc32::{self, FcsVerdict};
use crate::ethernet::{self, MacAddr, ETHERTYPE_IPV4};
use crate::ipv4;
use crate::parse::{classify_l2, L2Class};
use crate::types::{DropReason, PortId};

/// One route. `next_hop: None` means the prefix is directly connected and
/// the neighbor is resolved by the packet's own destination address.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteEntry {
    pub prefix: Ipv4Addr,
    pub prefix_len: u8,
    pub next_hop: Option<Ipv4Addr>,
    pub egress: PortId,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum RouteError {
    #[error("prefix length {len} is over 32")]
    BadPrefixLen { len: u8 },
    #[error("{prefix}/{prefix_len} has bits set beyond the prefix length")]
    DirtyPrefix { prefix: Ipv4Addr, prefix_len: u8 },
}

fn mask(prefix_len: u8) -> u32 {
    match prefix_len {
        0 => 0,
        len => u32::MAX << (32 - u32::from(len)),
    }
}

#[derive(Debug, Default)]
struct Node {
    child: [Option<Box<Node>>; 2],
    entry: Option<RouteEntry>,
}

/// Binary trie keyed by prefix bits, most significant first. Lookup keeps
/// the deepest entry seen on the way down, which is the longest match by
/// construction.
#[derive(Debug, Default)]
pub struct RouteTable {
    root: Node,
    len: usize,
}

impl RouteTable {
    pub fn new() -> Self {
        RouteTable::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Inserts an entry, replacing and returning the previous one for the
    /// same (prefix, length).
    pub fn insert(&mut self, entry: RouteEntry) -> Result<Option<RouteEntry>, RouteError> {
        if entry.prefix_len > 32 {
            return Err(RouteError::BadPrefixLen { len: entry.prefix_len });
        }
        let bits = u32::from(entry.prefix);
        if bits & !mask(entry.prefix_len) != 0 {
            return Err(RouteError::DirtyPrefix { prefix: entry.prefix, prefix_len: entry.prefix_len });
        }
        let mut node = &mut self.root;
        for i in 0..entry.prefix_len {
            let branch = ((bits >> (31 - i)) & 1) as usize;
            node = node.child[branch].get_or_insert_with(Box::default);
        }
        let old = node.entry.replace(entry);
        if old.is_none() {
            self.len += 1;
        }
        Ok(old)
    }

    /// Longest-prefix match, or `None` when nothing (not even a default
    /// route) covers the address.
    pub fn lookup(&self, dst: Ipv4Addr) -> Option<&RouteEntry> {
        let bits = u32::from(dst);
        let mut node = &self.root;
        let mut best = node.entry.as_ref();
        for i in 0..32 {
            let branch = ((bits >> (31 - i)) & 1) as usize;
            match node.child[branch].as_deref() {
                Some(next) => {
                    node = next;
                    best = node.entry.as_ref().or(best);
                }
                None => break,
            }
        }
        best
    }

    /// Every entry, in (prefix, length) order.
    pub fn entries(&self) -> Vec<RouteEntry> {
        fn walk(node: &Node, out: &mut Vec<RouteEntry>) {
            if let Some(entry) = node.entry {
                out.push(entry);
            }
            for child in node.child.iter().flatten() {
                walk(child, out);
            }
        }
        let mut out = Vec::with_capacity(self.len);
        walk(&self.root, &mut out);
        out.sort_by_key(|e| (u32::from(e.prefix), e.prefix_len));
        out
    }
}

/// Brute-force longest-prefix match over a flat entry list. Exists as an
/// independently checkable reference for the trie.
pub fn lookup_linear(entries: &[RouteEntry], dst: Ipv4Addr) -> Option<&RouteEntry> {
    let bits = u32::from(dst);
    entries
        .iter()
        .filter(|e| bits & mask(e.prefix_len) == u32::from(e.prefix))
        .max_by_key(|e| e.prefix_len)
}

/// Static next-hop resolution: IP to (MAC, port). Stands in for ARP.
#[derive(Debug, Default, Clone)]
pub struct NeighborTable {
    entries: BTreeMap<Ipv4Addr, (MacAddr, PortId)>,
}

impl NeighborTable {
    pub fn new() -> Self {
        NeighborTable::default()
    }

    pub fn insert(&mut self, ip: Ipv4Addr, mac: MacAddr, port: PortId) {
        self.entries.insert(ip, (mac, port));
    }

    pub fn resolve(&self, ip: Ipv4Addr) -> Option<(MacAddr, PortId)> {
        self.entries.get(&ip).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedFrame {
    pub frame: Vec<u8>,
    pub egress: PortId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RouterStats {
    pub frames: u64,
    pub forwarded: u64,
    pub drops: BTreeMap<DropReason, u64>,
}

impl RouterStats {
    pub fn dropped(&self) -> u64 {
        self.drops.values().sum()
    }
}

#[derive(Debug, Default)]
pub struct Router {
    port_macs: BTreeMap<PortId, MacAddr>,
    routes: RouteTable,
    neighbors: NeighborTable,
    stats: RouterStats,
}

impl Router {
    pub fn new() -> Self {
        Router::default()
    }

    pub fn set_port_mac(&mut self, port: PortId, mac: MacAddr) {
        self.port_macs.insert(port, mac);
    }

    pub fn port_mac(&self, port: PortId) -> Option<MacAddr> {
        self.port_macs.get(&port).copied()
    }

    pub fn ports(&self) -> impl Iterator<Item = (&PortId, &MacAddr)> {
        self.port_macs.iter()
    }

    pub fn add_route(&mut self, entry: RouteEntry) -> Result<Option<RouteEntry>, RouteError> {
        self.routes.insert(entry)
    }

    pub fn add_neighbor(&mut self, ip: Ipv4Addr, mac: MacAddr, port: PortId) {
        self.neighbors.insert(ip, mac, port);
    }

    pub fn routes(&self) -> &RouteTable {
        &self.routes
    }

    pub fn neighbors(&self) -> &NeighborTable {
        &self.neighbors
    }

    pub fn stats(&self) -> &RouterStats {
        &self.stats
    }

    /// Forwards one frame. The checks run in a fixed order and the first
    /// failure is the drop reason: malformed size, bad FCS, not IPv4,
    /// invalid IP header, not addressed to this router, no route, TTL
    /// expired, no neighbor binding. On success the frame goes out
    /// rewrapped: next hop's MAC as destination, the egress port's MAC as
    /// source, TTL one lower, checksum incrementally fixed, FCS fresh;
    /// every other payload byte is carried bit-identically.
    pub fn forward_packet(&mut self, raw: &[u8], ingress: PortId) -> Result<RoutedFrame, DropReason> {
        self.stats.frames += 1;
        match self.forward_inner(raw, ingress) {
            Ok(out) => {
                self.stats.forwarded += 1;
                Ok(out)
            }
            Err(reason) => {
                *self.stats.drops.entry(reason).or_insert(0) += 1;
                Err(reason)
            }
        }
    }

    fn forward_inner(&self, raw: &[u8], ingress: PortId) -> Result<RoutedFrame, DropReason> {
        let frame = ethernet::decode_frame(raw).map_err(|_| DropReason::Malformed)?;
        let verdict = crc32::fcs_verify(raw).expect("decoded frames are long enough");
        if verdict != FcsVerdict::Ok {
            return Err(DropReason::CrcError);
        }
        match classify_l2(frame.length_type) {
            L2Class::EthernetII { ethertype } if ethertype == ETHERTYPE_IPV4 => {}
            _ => return Err(DropReason::NotIp),
        }
        let ip = ipv4::parse_ipv4(&frame.payload).map_err(|_| DropReason::BadIpHeader)?;
        if !ip.checksum_valid {
            return Err(DropReason::BadIpHeader);
        }
        let my_mac = self.port_macs.get(&ingress);
        if !frame.dst.is_broadcast() && my_mac != Some(&frame.dst) {
            return Err(DropReason::NotForUs);
        }
        let route = self.routes.lookup(ip.dst).ok_or(DropReason::NoRoute)?;
        if ip.ttl <= 1 {
            return Err(DropReason::TtlExpired);
        }
        let gateway = route.next_hop.unwrap_or(ip.dst);
        let (next_mac, neighbor_port) =
            self.neighbors.resolve(gateway).ok_or(DropReason::NoNeighbor)?;
        if neighbor_port != route.egress {
            return Err(DropReason::NoNeighbor);
        }
        // The egress port must own a MAC to source the new frame from; a
        // port without one cannot transmit.
        let src_mac = self.port_macs.get(&route.egress).ok_or(DropReason::NoNeighbor)?;

        let mut payload = frame.payload;
        let new_checksum = ipv4::ipv4_checksum_decrement_ttl(ip.header_checksum, ip.ttl)
            .expect("ttl is at least 2 here");
        payload[8] = ip.ttl - 1;
        payload[10..12].copy_from_slice(&new_checksum.to_be_bytes());
        let out = ethernet::encode_frame(next_mac, *src_mac, ETHERTYPE_IPV4, &payload, false)
            .expect("payload length came from a valid frame");
        Ok(RoutedFrame { frame: out, egress: route.egress })
    }
}
