//! PGM (netpbm portable graymap) reader and writer.
//!
//! Supports plain `P2` and binary `P5`, maxval 1..=65535. Binary samples with
//! maxval > 255 are two bytes each, big-endian, per the netpbm convention.
//! `#` comments in the header are skipped. Parse errors carry the byte offset
//! where the problem was found.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::image::{DepthImage, ImageError};

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("bad magic at byte {offset}: expected \"P2\" or \"P5\"")]
    BadMagic { offset: usize },
    #[error("unexpected end of header at byte {offset} while reading {expected}")]
    UnexpectedEof {
        offset: usize,
        expected: &'static str,
    },
    #[error("invalid {expected} token {token:?} at byte {offset}")]
    BadToken {
        offset: usize,
        expected: &'static str,
        token: String,
    },
    #[error("maxval {value} at byte {offset} outside supported range 1..=65535")]
    MaxvalOutOfRange { offset: usize, value: u64 },
    #[error("payload truncated at byte {offset}: expected {expected} samples, got {got}")]
    TruncatedPayload {
        offset: usize,
        expected: usize,
        got: usize,
    },
    #[error("sample {value} at byte {offset} exceeds maxval {maxval}")]
    SampleExceedsMaxval {
        offset: usize,
        value: u64,
        maxval: u16,
    },
    #[error("zero image dimension at byte {offset}")]
    ZeroDimension { offset: usize },
    #[error("image dimensions at byte {offset} overflow the addressable sample count")]
    ImageTooLarge { offset: usize },
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// On-disk encoding for [`save_pgm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// `P2`, ASCII decimal samples.
    Plain,
    /// `P5`, binary samples (big-endian u16 when maxval > 255).
    Binary,
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<DepthImage, PgmError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| PgmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode(&bytes)
}

pub fn save_pgm(
    image: &DepthImage,
    path: impl AsRef<Path>,
    format: PgmFormat,
) -> Result<(), PgmError> {
    let path = path.as_ref();
    fs::write(path, encode(image, format)).map_err(|source| PgmError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Cursor over the header region: skips whitespace and `#` comments, yields
/// ASCII tokens with their byte offsets.
struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn skip_filler(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self, expected: &'static str) -> Result<(usize, &'a str), PgmError> {
        self.skip_filler();
        let start = self.pos;
        if start >= self.bytes.len() {
            return Err(PgmError::UnexpectedEof {
                offset: start,
                expected,
            });
        }
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        let token =
            std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| PgmError::BadToken {
                offset: start,
                expected,
                token: String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned(),
            })?;
        Ok((start, token))
    }

    fn number(&mut self, expected: &'static str) -> Result<(usize, u64), PgmError> {
        let (offset, token) = self.token(expected)?;
        let value = token.parse::<u64>().map_err(|_| PgmError::BadToken {
            offset,
            expected,
            token: token.to_owned(),
        })?;
        Ok((offset, value))
    }
}

/// Parses a PGM document from memory.
pub fn decode(bytes: &[u8]) -> Result<DepthImage, PgmError> {
    let mut cur = HeaderCursor::new(bytes);
    let (magic_off, magic) = cur.token("magic")?;
    let binary = match magic {
        "P2" => false,
        "P5" => true,
        _ => return Err(PgmError::BadMagic { offset: magic_off }),
    };

    let (w_off, width) = cur.number("width")?;
    let (h_off, height) = cur.number("height")?;
    if width == 0 {
        return Err(PgmError::ZeroDimension { offset: w_off });
    }
    if height == 0 {
        return Err(PgmError::ZeroDimension { offset: h_off });
    }
    let (mv_off, maxval) = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(PgmError::MaxvalOutOfRange {
            offset: mv_off,
            value: maxval,
        });
    }
    let maxval = maxval as u16;
    let expected = width
        .checked_mul(height)
        .and_then(|n| usize::try_from(n).ok())
        .ok_or(PgmError::ImageTooLarge { offset: w_off })?;
    let width = width as usize;
    let height = height as usize;

    let samples = if binary {
        // Exactly one whitespace byte separates the header from the payload.
        let mut pos = cur.pos;
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(PgmError::UnexpectedEof {
                offset: pos,
                expected: "raster separator",
            });
        }
        pos += 1;
        decode_binary_samples(&bytes[pos..], pos, expected, maxval)?
    } else {
        decode_plain_samples(&mut cur, expected, maxval)?
    };

    Ok(DepthImage::new(width, height, maxval, samples)?)
}

fn decode_binary_samples(
    payload: &[u8],
    base: usize,
    expected: usize,
    maxval: u16,
) -> Result<Vec<u16>, PgmError> {
    let wide = maxval > 255;
    let bytes_per = if wide { 2 } else { 1 };
    if payload.len() / bytes_per < expected {
        return Err(PgmError::TruncatedPayload {
            offset: base + payload.len(),
            expected,
            got: payload.len() / bytes_per,
        });
    }
    let mut samples = Vec::with_capacity(expected);
    for i in 0..expected {
        let at = i * bytes_per;
        let value = if wide {
            u16::from_be_bytes([payload[at], payload[at + 1]])
        } else {
            u16::from(payload[at])
        };
        if value > maxval {
            return Err(PgmError::SampleExceedsMaxval {
                offset: base + at,
                value: u64::from(value),
                maxval,
            });
        }
        samples.push(value);
    }
    Ok(samples)
}

fn decode_plain_samples(
    cur: &mut HeaderCursor<'_>,
    expected: usize,
    maxval: u16,
) -> Result<Vec<u16>, PgmError> {
    // Cap the preallocation: `expected` comes from an untrusted header.
    let mut samples = Vec::with_capacity(expected.min(1 << 20));
    for _ in 0..expected {
        cur.skip_filler();
        if cur.pos >= cur.bytes.len() {
            return Err(PgmError::TruncatedPayload {
                offset: cur.pos,
                expected,
                got: samples.len(),
            });
        }
        let (offset, value) = cur.number("sample")?;
        if value > u64::from(maxval) {
            return Err(PgmError::SampleExceedsMaxval {
                offset,
                value,
                maxval,
            });
        }
        samples.push(value as u16);
    }
    Ok(samples)
}

/// Serializes a PGM document into memory. `load_pgm(save_pgm(x))` is the
/// identity on (width, height, max_value, samples) for both formats.
pub fn encode(image: &DepthImage, format: PgmFormat) -> Vec<u8> {
    let header = format!(
        "{}\n{} {}\n{}\n",
        match format {
            PgmFormat::Plain => "P2",
            PgmFormat::Binary => "P5",
        },
        image.width(),
        image.height(),
        image.max_value()
    );
    let mut out = header.into_bytes();
    match format {
        PgmFormat::Plain => {
            // Up to 11 samples per line keeps lines under the 70-char limit
            // that strict plain-format readers enforce.
            for chunk in image.samples().chunks(11) {
                let line: Vec<String> = chunk.iter().map(|s| s.to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        PgmFormat::Binary => {
            if image.max_value() > 255 {
                for &s in image.samples() {
                    out.extend_from_slice(&s.to_be_bytes());
                }
            } else {
                out.extend(image.samples().iter().map(|&s| s as u8));
            }
        }
    }
    out
}
