//! Frozen fixtures shared by unit tests.

use std::net::Ipv4Addr;

use crate::ethernet::MacAddr;
use crate::ipv4;

/// Locally administered unicast MAC `02:00:00:00:00:<last>`.
pub fn mac(last: u8) -> MacAddr {
    MacAddr([0x02, 0, 0, 0, 0, last])
}

/// 64-byte UDP frame, frozen from an independent bit-serial computation:
/// 02::01 -> 02::02, IPv4 10.0.0.1 -> 10.0.0.2, ttl 64, header checksum
/// 0x1497, UDP 1024 -> 53 carrying DE AD BE EF, zero padding, FCS
/// 0x50236C8D stored least-significant byte first.
pub const GOLDEN_UDP_HEX: &str = "0200000000020200000000010800450000201234400040111497\
0a0000010a00000204000035000c0000deadbeef00000000000000000000000000008d6c2350";

pub fn golden_udp_frame() -> Vec<u8> {
    hex_bytes(GOLDEN_UDP_HEX)
}

pub fn hex_bytes(hex: &str) -> Vec<u8> {
    hex.as_bytes()
        .chunks(2)
        .map(|pair| u8::from_str_radix(std::str::from_utf8(pair).unwrap(), 16).unwrap())
        .collect()
}

/// Minimal IPv4 packet: 20-byte header with a correct checksum, UDP-tagged
/// but carrying an opaque body.
pub fn ipv4_packet(src: Ipv4Addr, dst: Ipv4Addr, ttl: u8, body: &[u8]) -> Vec<u8> {
    let total = 20 + body.len();
    let mut header = vec![
        0x45,
        0x00,
        (total >> 8) as u8,
        total as u8,
        0x00,
        0x01,
        0x00,
        0x00,
        ttl,
        ipv4::PROTO_UDP,
        0,
        0,
    ];
    header.extend_from_slice(&src.octets());
    header.extend_from_slice(&dst.octets());
    let ck = ipv4::ipv4_checksum(&header).unwrap();
    header[10..12].copy_from_slice(&ck.to_be_bytes());
    header.extend_from_slice(body);
    header
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ethernet;
    use crate::ipv4;

    // The encoder must reproduce the frozen bytes exactly; this pins the
    // byte layout, the padding rule and the FCS byte order all at once.
    #[test]
    fn encoder_reproduces_the_frozen_golden_frame() {
        let mut ip_packet = Vec::new();
        let mut header = vec![
            0x45, 0x00, 0x00, 0x20, 0x12, 0x34, 0x40, 0x00, 0x40, ipv4::PROTO_UDP, 0, 0, 10, 0,
            0, 1, 10, 0, 0, 2,
        ];
        let ck = ipv4::ipv4_checksum(&header).unwrap();
        header[10] = (ck >> 8) as u8;
        header[11] = ck as u8;
        ip_packet.extend_from_slice(&header);
        ip_packet.extend_from_slice(&1024u16.to_be_bytes());
        ip_packet.extend_from_slice(&53u16.to_be_bytes());
        ip_packet.extend_from_slice(&12u16.to_be_bytes());
        ip_packet.extend_from_slice(&[0, 0]);
        ip_packet.extend_from_slice(&[0xDE, 0xAD, 0xBE, 0xEF]);

        let raw = ethernet::encode_frame(mac(2), mac(1), 0x0800, &ip_packet, true).unwrap();
        assert_eq!(raw, golden_udp_frame());
    }
}
