//! Frame dumps as text: whitespace-separated hex octets, `#` starting a
//! comment, and any line holding no octets closing the frame under
//! construction. One frame may span several lines.

use std::fs;
use std::io;
use std::mem;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HexDumpError {
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

/// Walks the octet tokens of one comment-stripped line, reporting each
/// token's 1-based starting byte column.
fn tokens(body: &str) -> impl Iterator<Item = (usize, &str)> {
    let bytes = body.as_bytes();
    let mut at = 0usize;
    std::iter::from_fn(move || {
        while at < bytes.len() && bytes[at].is_ascii_whitespace() {
            at += 1;
        }
        if at >= bytes.len() {
            return None;
        }
        let start = at;
        while at < bytes.len() && !bytes[at].is_ascii_whitespace() {
            at += 1;
        }
        Some((start + 1, &body[start..at]))
    })
}

pub fn parse_hexdump(text: &str) -> Result<Vec<Vec<u8>>, HexDumpError> {
    let mut frames = Vec::new();
    let mut current: Vec<u8> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut any = false;
        for (col, token) in tokens(body) {
            let value = octet(token).ok_or(HexDumpError::BadHexToken { line, col })?;
            current.push(value);
            any = true;
        }
        if !any && !current.is_empty() {
            frames.push(mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        frames.push(current);
    }
    Ok(frames)
}

pub fn read_hexdump(path: impl AsRef<Path>) -> Result<Vec<Vec<u8>>, HexDumpError> {
    parse_hexdump(&fs::read_to_string(path)?)
}

/// Renders frames in the dump format, 16 octets per line, one blank line
/// between frames. `parse_hexdump` inverts it.
pub fn format_hexdump(frames: &[Vec<u8>]) -> String {
    let mut out = String::new();
    for (i, frame) in frames.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for chunk in frame.chunks(16) {
            let line: Vec<String> = chunk.iter().map(|b| format!("{b:02x}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blank_lines_separate_frames() {
        let text = "aa bb cc\n\nde ad be ef\n";
        assert_eq!(
            parse_hexdump(text).unwrap(),
            vec![vec![0xaa, 0xbb, 0xcc], vec![0xde, 0xad, 0xbe, 0xef]]
        );
    }

    #[test]
    fn one_frame_may_span_lines() {
        let text = "00 01 02\n03 04\n";
        assert_eq!(parse_hexdump(text).unwrap(), vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn comments_and_padding_are_ignored() {
        let text = "# capture of one frame\n  aa\tbb # trailing note\n";
        assert_eq!(parse_hexdump(text).unwrap(), vec![vec![0xaa, 0xbb]]);
    }

    #[test]
    fn a_comment_line_splits_frames_like_a_blank_one() {
        let text = "aa\n# break\nbb\n";
        assert_eq!(parse_hexdump(text).unwrap(), vec![vec![0xaa], vec![0xbb]]);
    }

    #[test]
    fn comments_only_yield_no_frames() {
        let text = "# one\n# two\n\n";
        assert_eq!(parse_hexdump(text).unwrap(), Vec::<Vec<u8>>::new());
    }

    #[test]
    fn the_last_frame_needs_no_trailing_blank() {
        assert_eq!(parse_hexdump("ff").unwrap(), vec![vec![0xff]]);
    }

    #[test]
    fn repeated_blank_lines_add_nothing() {
        let text = "\n\naa\n\n\n\nbb\n\n";
        assert_eq!(parse_hexdump(text).unwrap(), vec![vec![0xaa], vec![0xbb]]);
    }

    #[test]
    fn bad_tokens_are_located() {
        let err = parse_hexdump("aa bb\ncc GG\n").unwrap_err();
        assert!(matches!(err, HexDumpError::BadHexToken { line: 2, col: 4 }));
        let err = parse_hexdump("a\n").unwrap_err();
        assert!(matches!(err, HexDumpError::BadHexToken { line: 1, col: 1 }));
        let err = parse_hexdump("aaa\n").unwrap_err();
        assert!(matches!(err, HexDumpError::BadHexToken { line: 1, col: 1 }));
    }

    #[test]
    fn signed_tokens_are_not_octets() {
        assert!(matches!(
            parse_hexdump("+f\n").unwrap_err(),
            HexDumpError::BadHexToken { line: 1, col: 1 }
        ));
    }

    #[test]
    fn format_parse_round_trip() {
        let frames = vec![(0u8..60).collect::<Vec<u8>>(), vec![0xff; 3], vec![0x00]];
        assert_eq!(parse_hexdump(&format_hexdump(&frames)).unwrap(), frames);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frames.hex");
        let frames = vec![vec![1, 2, 3], vec![4, 5]];
        fs::write(&path, format_hexdump(&frames)).unwrap();
        assert_eq!(read_hexdump(&path).unwrap(), frames);
    }
}
