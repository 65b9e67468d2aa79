//! Replay traces: one arrival per line as `<port> <time_us> <octet>…`,
//! with `#` comments and blank lines skipped. Times are microseconds
//! and feed the device clock during replay, so address aging works on
//! the same axis.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::types::PortId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub port: PortId,
    pub t_us: u64,
    pub frame: Vec<u8>,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: expected `<port> <time_us> <octet> [octet…]`")]
    MissingFields { line: usize },
    #[error("line {line}: `{token}` is not a port number")]
    BadPort { line: usize, token: String },
    #[error("line {line}: `{token}` is not a microsecond time")]
    BadTime { line: usize, token: String },
    #[error("line {line} column {col}: token is not two hex digits")]
    BadHexToken { line: usize, col: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn octet(token: &str) -> Option<u8> {
    if token.len() == 2 && token.chars().all(|c| c.is_ascii_hexdigit()) {
        u8::from_str_radix(token, 16).ok()
    } else {
        None
    }
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceEntry>, TraceError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let bytes = body.as_bytes();
        let mut fields: Vec<(usize, &str)> = Vec::new();
        let mut at = 0usize;
        while at < bytes.len() {
            if bytes[at].is_ascii_whitespace() {
                at += 1;
                continue;
            }
            let start = at;
            while at < bytes.len() && !bytes[at].is_ascii_whitespace() {
                at += 1;
            }
            fields.push((start + 1, &body[start..at]));
        }
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 3 {
            return Err(TraceError::MissingFields { line });
        }
        let port: PortId = fields[0]
            .1
            .parse()
            .map_err(|_| TraceError::BadPort { line, token: fields[0].1.to_string() })?;
        let t_us: u64 = fields[1]
            .1
            .parse()
            .map_err(|_| TraceError::BadTime { line, token: fields[1].1.to_string() })?;
        let mut frame = Vec::with_capacity(fields.len() - 2);
        for &(col, token) in &fields[2..] {
            frame.push(octet(token).ok_or(TraceError::BadHexToken { line, col })?);
        }
        entries.push(TraceEntry { port, t_us, frame });
    }
    Ok(entries)
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<TraceEntry>, TraceError> {
    parse_trace(&fs::read_to_string(path)?)
}
