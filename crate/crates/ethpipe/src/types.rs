//! Identifiers shared by the switch, router and simulator.

use std::fmt;

/// Zero-based device port index.
pub type PortId = u32;

/// Why a frame was not forwarded. One enum serves the switch (discards),
/// the router (drops) and the simulator (egress queue overflow) so that
/// stats can be keyed uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DropReason {
    /// Frame size outside the 64..=1518 byte envelope.
    Malformed,
    /// Trailing FCS did not match the frame contents.
    CrcError,
    /// Destination lives on the port the frame arrived on.
    SameSegment,
    /// Not an Ethernet II IPv4 frame.
    NotIp,
    /// IPv4 header unparsable or its checksum is wrong.
    BadIpHeader,
    /// Destination MAC is neither the receiving port's MAC nor broadcast.
    NotForUs,
    /// No route entry covers the destination address.
    NoRoute,
    /// TTL would reach zero in transit.
    TtlExpired,
    /// Next hop has no neighbor entry on the egress port.
    NoNeighbor,
    /// Egress queue was full.
    Overflow,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::Malformed => "malformed",
            DropReason::CrcError => "crc_error",
            DropReason::SameSegment => "same_segment",
            DropReason::NotIp => "not_ip",
            DropReason::BadIpHeader => "bad_ip_header",
            DropReason::NotForUs => "not_for_us",
            DropReason::NoRoute => "no_route",
            DropReason::TtlExpired => "ttl_expired",
            DropReason::NoNeighbor => "no_neighbor",
            DropReason::Overflow => "overflow",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
