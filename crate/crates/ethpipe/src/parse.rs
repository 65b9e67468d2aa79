//! Frame metadata extraction: L2 classification plus the optional IPv4 and
//! transport-port views of a decoded frame.

use crate::crc32::{self, FcsVerdict};
use crate::ethernet::{self, FrameError, MacAddr, ETHERTYPE_IPV4};
use crate::ipv4::{self, Ipv4Header, PROTO_TCP, PROTO_UDP};

/// How the 16-bit length/type field reads. Values 1501..=0x05FF fit
/// neither encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L2Class {
    EthernetII { ethertype: u16 },
    Ieee8023 { length: u16 },
    Malformed { length_type: u16 },
}

pub fn classify_l2(length_type: u16) -> L2Class {
    if length_type >= 0x0600 {
        L2Class::EthernetII { ethertype: length_type }
    } else if length_type <= 1500 {
        L2Class::Ieee8023 { length: length_type }
    } else {
        L2Class::Malformed { length_type }
    }
}

/// Transport ports, read only for TCP and UDP on unfragmented packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct L4Info {
    pub protocol: u8,
    pub src_port: u16,
    pub dst_port: u16,
}

/// Everything the decode path knows about one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPacket {
    pub dst_mac: MacAddr,
    pub src_mac: MacAddr,
    pub l2: L2Class,
    /// Serialized frame length in bytes, FCS included.
    pub frame_len: usize,
    pub fcs: FcsVerdict,
    pub ip: Option<Ipv4Header>,
    pub l4: Option<L4Info>,
}

/// IPv4 and L4 views of a frame payload, given its length/type field.
/// Unparsable upper layers yield `None`, never an error.
pub(crate) fn ip_and_l4(length_type: u16, payload: &[u8]) -> (Option<Ipv4Header>, Option<L4Info>) {
    if length_type != ETHERTYPE_IPV4 {
        return (None, None);
    }
    let Ok(ip) = ipv4::parse_ipv4(payload) else {
        return (None, None);
    };
    let l4 = l4_ports(&ip, payload);
    (Some(ip), l4)
}

fn l4_ports(ip: &Ipv4Header, payload: &[u8]) -> Option<L4Info> {
    if ip.protocol != PROTO_TCP && ip.protocol != PROTO_UDP {
        return None;
    }
    // Later fragments carry no transport header.
    if ip.frag_offset() != 0 {
        return None;
    }
    let start = ip.header_len();
    let end = (ip.total_length as usize).min(payload.len());
    if end < start + 4 {
        return None;
    }
    Some(L4Info {
        protocol: ip.protocol,
        src_port: u16::from_be_bytes([payload[start], payload[start + 1]]),
        dst_port: u16::from_be_bytes([payload[start + 2], payload[start + 3]]),
    })
}

/// One-shot decode: frame fields, L2 class, optional IPv4/L4 views and,
/// when `check_fcs` is set, the FCS verdict. Only frame-size errors
/// propagate; everything above L2 degrades to absent fields.
pub fn extract_metadata(raw: &[u8], check_fcs: bool) -> Result<ParsedPacket, FrameError> {
    let frame = ethernet::decode_frame(raw)?;
    let fcs = if check_fcs {
        // decode_frame guarantees enough bytes for a verdict
        crc32::fcs_verify(raw).expect("frame length already validated")
    } else {
        FcsVerdict::Unchecked
    };
    let (ip, l4) = ip_and_l4(frame.length_type, &frame.payload);
    Ok(ParsedPacket {
        dst_mac: frame.dst,
        src_mac: frame.src,
        l2: classify_l2(frame.length_type),
        frame_len: raw.len(),
        fcs,
        ip,
        l4,
    })
}
