//! PGM (portable graymap) reader and writer.
//!
//! Reads ASCII `P2` and binary `P5` with maxval up to 65535 (two-byte
//! big-endian samples above 255, per the format). Writes `P2`. Intensities
//! map to raw / maxval on read and round half-up on write.

use std::io::Write;
use std::path::Path;

use super::FormatError;
use crate::grid::GrayImage;

/// Byte-level tokenizer over the PGM header/ASCII raster; `#` starts a
/// comment running to end of line.
struct Tokens<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn skip_filler(&mut self) {
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Option<&'a str> {
        self.skip_filler();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            if self.data[self.pos] == b'#' {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            std::str::from_utf8(&self.data[start..self.pos]).ok()
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_filler();
        self.pos >= self.data.len()
    }
}

fn header_number(tokens: &mut Tokens, what: &str) -> Result<usize, FormatError> {
    let tok = tokens
        .next()
        .ok_or_else(|| FormatError::MalformedHeader(format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| FormatError::MalformedHeader(format!("{what}: `{tok}`")))
}

pub fn read_pgm(path: &Path) -> Result<GrayImage, FormatError> {
    let data = std::fs::read(path)?;
    let mut tokens = Tokens::new(&data);
    let magic = tokens
        .next()
        .ok_or_else(|| FormatError::MalformedHeader("empty file".into()))?;
    if magic != "P2" && magic != "P5" {
        return Err(FormatError::MalformedHeader(format!("magic `{magic}`")));
    }
    let width = header_number(&mut tokens, "width")?;
    let height = header_number(&mut tokens, "height")?;
    let maxval = header_number(&mut tokens, "maxval")?;
    if width == 0 || height == 0 {
        return Err(FormatError::MalformedHeader("zero dimension".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(FormatError::MalformedHeader(format!("maxval {maxval}")));
    }

    let count = width * height;
    let mut raw = Vec::with_capacity(count);
    if magic == "P2" {
        for _ in 0..count {
            let tok = tokens
                .next()
                .ok_or_else(|| FormatError::TruncatedData("pixel data ended early".into()))?;
            let v: usize = tok
                .parse()
                .map_err(|_| FormatError::InvalidValue(format!("pixel `{tok}`")))?;
            if v > maxval {
                return Err(FormatError::InvalidValue(format!(
                    "pixel {v} above maxval {maxval}"
                )));
            }
            raw.push(v);
        }
        if !tokens.at_end() {
            return Err(FormatError::MalformedHeader(
                "trailing data after raster".into(),
            ));
        }
    } else {
        // single whitespace byte separates the header from the payload
        let start = tokens.pos + 1;
        if tokens.pos >= data.len() || !data[tokens.pos].is_ascii_whitespace() {
            return Err(FormatError::MalformedHeader(
                "missing raster separator".into(),
            ));
        }
        let bytes_per = if maxval > 255 { 2 } else { 1 };
        let payload = &data[start..];
        if payload.len() < count * bytes_per {
            return Err(FormatError::TruncatedData(format!(
                "raster holds {} bytes, need {}",
                payload.len(),
                count * bytes_per
            )));
        }
        if payload.len() > count * bytes_per {
            return Err(FormatError::MalformedHeader(
                "trailing data after raster".into(),
            ));
        }
        for k in 0..count {
            let v = if bytes_per == 1 {
                payload[k] as usize
            } else {
                (payload[2 * k] as usize) << 8 | payload[2 * k + 1] as usize
            };
            if v > maxval {
                return Err(FormatError::InvalidValue(format!(
                    "pixel {v} above maxval {maxval}"
                )));
            }
            raw.push(v);
        }
    }

    let scale = maxval as f64;
    Ok(GrayImage::new(
        width,
        height,
        raw.into_iter().map(|v| v as f64 / scale).collect(),
    ))
}

/// Writes ASCII `P2` with the given maxval, rounding half-up.
pub fn write_pgm_with_maxval(path: &Path, img: &GrayImage, maxval: u16) -> Result<(), FormatError> {
    assert!(maxval > 0, "maxval must be positive");
    let mut out = String::new();
    out.push_str("P2\n");
    out.push_str(&format!("{} {}\n{}\n", img.width(), img.height(), maxval));
    for i in 0..img.height() {
        let row: Vec<String> = (0..img.width())
            .map(|j| {
                let q = (img.at(i, j) * maxval as f64 + 0.5).floor() as u32;
                q.min(maxval as u32).to_string()
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

/// Writes ASCII `P2` with the default 8-bit maxval.
pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<(), FormatError> {
    write_pgm_with_maxval(path, img, 255)
}
