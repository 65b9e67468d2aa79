//! File formats around the engines: pcap captures, hex frame dumps,
//! replay traces, and device or scenario configuration.

pub mod config;
pub mod hexdump;
pub mod pcap;
pub mod trace;
