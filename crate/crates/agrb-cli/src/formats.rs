//! On-disk formats: binary PGM/PPM, the raw mosaic container, compressed
//! streams, and quantization table files.

use std::fs;
use std::io::Write;
use std::path::Path;

use agrb_core::codec::CompressedStream;
use agrb_core::frame::{BayerFrame, RgbImage};
use agrb_core::QuantTable;

use crate::error::{CliError, Result};

/// Raw mosaic container magic.
pub const CBAY_MAGIC: [u8; 4] = *b"CBAY";
pub const CBAY_VERSION: u8 = 1;
/// CBAY header: magic, version, padded w/h, original w/h (u16 LE each).
pub const CBAY_HEADER: usize = 13;

/// Accepted mosaic file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameFormat {
    Pgm8,
    RawCbay,
}

impl FrameFormat {
    /// Chooses a format from a file extension; defaults to PGM.
    pub fn from_path(path: &Path) -> FrameFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("cbay") | Some("raw") => FrameFormat::RawCbay,
            _ => FrameFormat::Pgm8,
        }
    }
}

fn data_err(path: &Path, what: impl Into<String>) -> CliError {
    CliError::Data(format!("{}: {}", path.display(), what.into()))
}

/// Parses PGM/PPM headers: magic, then width/height/maxval tokens with
/// whitespace and '#' comments between them, then a single whitespace byte.
fn parse_netpbm_header<'a>(
    bytes: &'a [u8],
    magic: &str,
    path: &Path,
) -> Result<(usize, usize, &'a [u8])> {
    if bytes.len() < 2 || &bytes[0..2] != magic.as_bytes() {
        return Err(data_err(path, format!("not a {magic} file")));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(data_err(path, "malformed header"));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("digits are ascii");
        *field = text
            .parse()
            .map_err(|_| data_err(path, "header value out of range"))?;
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(data_err(path, "malformed header"));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(data_err(path, "only maxval 255 is supported"));
    }
    if width == 0 || height == 0 {
        return Err(data_err(path, "zero dimensions"));
    }
    Ok((width, height, &bytes[pos..]))
}

/// Loads an 8-bit grayscale PGM (P5).
pub fn load_pgm(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| data_err(path, e.to_string()))?;
    let (width, height, payload) = parse_netpbm_header(&bytes, "P5", path)?;
    if payload.len() < width * height {
        return Err(data_err(path, "truncated payload"));
    }
    Ok((width, height, payload[..width * height].to_vec()))
}

pub fn store_pgm(path: &Path, width: usize, height: usize, samples: &[u8]) -> Result<()> {
    let mut out = Vec::with_capacity(samples.len() + 32);
    write!(out, "P5\n{width} {height}\n255\n").expect("vec write");
    out.extend_from_slice(samples);
    fs::write(path, out).map_err(|e| data_err(path, e.to_string()))
}

/// Loads a 24-bit RGB PPM (P6).
pub fn load_ppm(path: &Path) -> Result<RgbImage> {
    let bytes = fs::read(path).map_err(|e| data_err(path, e.to_string()))?;
    let (width, height, payload) = parse_netpbm_header(&bytes, "P6", path)?;
    if payload.len() < width * height * 3 {
        return Err(data_err(path, "truncated payload"));
    }
    RgbImage::new(width, height, payload[..width * height * 3].to_vec())
        .map_err(|e| data_err(path, e.to_string()))
}

pub fn store_ppm(path: &Path, image: &RgbImage) -> Result<()> {
    let mut out = Vec::with_capacity(image.data.len() + 32);
    write!(out, "P6\n{} {}\n255\n", image.width, image.height).expect("vec write");
    out.extend_from_slice(&image.data);
    fs::write(path, out).map_err(|e| data_err(path, e.to_string()))
}

/// Loads a mosaic from PGM or the raw CBAY container, padding odd-of-8
/// dimensions by edge replication (even dimensions are required).
pub fn load_frame(path: &Path, format: FrameFormat) -> Result<BayerFrame> {
    match format {
        FrameFormat::Pgm8 => {
            let (width, height, samples) = load_pgm(path)?;
            BayerFrame::with_padding(width, height, samples)
                .map_err(|e| data_err(path, e.to_string()))
        }
        FrameFormat::RawCbay => {
            let bytes = fs::read(path).map_err(|e| data_err(path, e.to_string()))?;
            if bytes.len() < CBAY_HEADER {
                return Err(data_err(path, "truncated header"));
            }
            if bytes[0..4] != CBAY_MAGIC {
                return Err(data_err(path, "bad magic"));
            }
            if bytes[4] != CBAY_VERSION {
                return Err(data_err(path, "unsupported version"));
            }
            let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]) as usize;
            let width = u16_at(5);
            let height = u16_at(7);
            let original_width = u16_at(9);
            let original_height = u16_at(11);
            let payload = &bytes[CBAY_HEADER..];
            if payload.len() < width * height {
                return Err(data_err(path, "truncated payload"));
            }
            let mut frame = BayerFrame::new(width, height, payload[..width * height].to_vec())
                .map_err(|e| data_err(path, e.to_string()))?;
            if original_width > width || original_height > height {
                return Err(data_err(path, "original size exceeds stored size"));
            }
            frame.set_original_size(original_width, original_height);
            Ok(frame)
        }
    }
}

/// Stores a mosaic. PGM carries no original-size field, so `crop` selects
/// between the pre-padding region and the padded frame; CBAY always stores
/// the padded frame plus the original dimensions.
pub fn store_frame(path: &Path, frame: &BayerFrame, format: FrameFormat, crop: bool) -> Result<()> {
    match format {
        FrameFormat::Pgm8 => {
            if crop {
                let cropped = frame.crop_to_original();
                store_pgm(path, cropped.width, cropped.height, &cropped.samples)
            } else {
                store_pgm(path, frame.width(), frame.height(), frame.samples())
            }
        }
        FrameFormat::RawCbay => {
            let mut out = Vec::with_capacity(CBAY_HEADER + frame.samples().len());
            out.extend_from_slice(&CBAY_MAGIC);
            out.push(CBAY_VERSION);
            for v in [
                frame.width(),
                frame.height(),
                frame.original_width(),
                frame.original_height(),
            ] {
                out.extend_from_slice(&(v as u16).to_le_bytes());
            }
            out.extend_from_slice(frame.samples());
            fs::write(path, out).map_err(|e| data_err(path, e.to_string()))
        }
    }
}

pub fn load_stream(path: &Path) -> Result<CompressedStream> {
    let bytes = fs::read(path).map_err(|e| data_err(path, e.to_string()))?;
    CompressedStream::from_bytes(&bytes).map_err(|e| data_err(path, e.to_string()))
}

pub fn store_stream(path: &Path, stream: &CompressedStream) -> Result<()> {
    fs::write(path, stream.to_bytes()).map_err(|e| data_err(path, e.to_string()))
}

/// Parses a table file: `luma = <16 ints>` and `chroma = <16 ints>` lines
/// (zigzag order), '#' comments allowed.
pub fn parse_quant_tables(text: &str, origin: &Path) -> Result<QuantTable> {
    let mut luma: Option<[u8; 16]> = None;
    let mut chroma: Option<[u8; 16]> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            data_err(
                origin,
                format!("line {}: expected key = values", lineno + 1),
            )
        })?;
        let mut shifts = [0u8; 16];
        let parts: Vec<&str> = value.split(',').map(str::trim).collect();
        if parts.len() != 16 {
            return Err(data_err(
                origin,
                format!(
                    "line {}: expected 16 shifts, found {}",
                    lineno + 1,
                    parts.len()
                ),
            ));
        }
        for (slot, part) in shifts.iter_mut().zip(parts) {
            *slot = part.parse().map_err(|_| {
                data_err(origin, format!("line {}: bad shift {part:?}", lineno + 1))
            })?;
        }
        match key.trim() {
            "luma" => luma = Some(shifts),
            "chroma" => chroma = Some(shifts),
            other => {
                return Err(data_err(
                    origin,
                    format!("line {}: unknown key {other:?}", lineno + 1),
                ))
            }
        }
    }
    let luma = luma.ok_or_else(|| data_err(origin, "missing luma shifts"))?;
    let chroma = chroma.ok_or_else(|| data_err(origin, "missing chroma shifts"))?;
    QuantTable::from_zigzag_shifts(&luma, &chroma).map_err(|e| data_err(origin, e.to_string()))
}

pub fn load_quant_tables(path: &Path) -> Result<QuantTable> {
    let text = fs::read_to_string(path).map_err(|e| data_err(path, e.to_string()))?;
    parse_quant_tables(&text, path)
}

pub fn store_quant_tables(path: &Path, tables: &QuantTable) -> Result<()> {
    let (luma, chroma) = tables.to_zigzag_shifts();
    let fmt = |shifts: [u8; 16]| {
        shifts
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let text = format!("luma = {}\nchroma = {}\n", fmt(luma), fmt(chroma));
    fs::write(path, text).map_err(|e| data_err(path, e.to_string()))
}
