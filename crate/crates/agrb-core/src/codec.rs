//! Frame-level encode/decode and the compressed container layout.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! "AGRB"  magic, 4 bytes
//! u8      version (currently 1)
//! u16     padded width        u16  padded height
//! u16     original width      u16  original height
//! u8      quant table id (0 lossless, 1 default, 2 external)
//! u32     payload word count
//! u32[n]  payload words (bits MSB-first within each word)
//! ```
//!
//! Planes are coded in the fixed order Y, Dg, Cb, Cr, each completely before
//! the next, as raster-scanned 4x4 blocks. Y/Dg share the luma Rice contexts
//! and quantization class, Cb/Cr the chroma ones. The DC predictor resets at
//! each plane start: 0 for luma planes, 128 for chroma planes.

use alloc::vec::Vec;

use crate::bitio::{BitSink, BitSource};
use crate::dct::{fdct4x4, idct4x4};
use crate::entropy::{decode_block, encode_block, unzigzag, zigzag, RiceContext};
use crate::error::{Error, Result};
use crate::frame::{BayerFrame, PlaneId, PlaneSet};
use crate::quant::{dequantize_block, quantize_block, QuantTable, TableId};
use crate::rct::{forward_rct, inverse_rct};

pub const MAGIC: [u8; 4] = *b"AGRB";
pub const VERSION: u8 = 1;
/// Fixed header size in bytes.
pub const HEADER_BYTES: usize = 18;

/// DC predictor value at the start of a luma plane.
pub const DC_RESET_LUMA: i32 = 0;
/// DC predictor value at the start of a chroma plane.
pub const DC_RESET_CHROMA: i32 = 128;

/// Quantization table choice for encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableSelection {
    /// All shifts zero; decode reproduces the frame bit-exactly.
    Lossless,
    /// Built-in default tables.
    Default,
    /// Caller-provided tables, shipped out of band.
    External(QuantTable),
}

impl TableSelection {
    fn resolve(&self) -> (TableId, QuantTable) {
        match self {
            TableSelection::Lossless => (TableId::Lossless, QuantTable::lossless()),
            TableSelection::Default => (TableId::Default, QuantTable::default_tables()),
            TableSelection::External(t) => (TableId::External, t.clone()),
        }
    }
}

/// An encoded frame: header fields plus the entropy-coded payload words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedStream {
    pub width: usize,
    pub height: usize,
    pub original_width: usize,
    pub original_height: usize,
    pub table_id: TableId,
    pub payload: Vec<u32>,
}

impl CompressedStream {
    /// Total serialized size in bytes.
    pub fn byte_len(&self) -> usize {
        HEADER_BYTES + 4 * self.payload.len()
    }

    /// Serializes header and payload to the container layout.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.byte_len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        for v in [
            self.width,
            self.height,
            self.original_width,
            self.original_height,
        ] {
            out.extend_from_slice(&(v as u16).to_le_bytes());
        }
        out.push(self.table_id as u8);
        out.extend_from_slice(&(self.payload.len() as u32).to_le_bytes());
        for w in &self.payload {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    /// Parses and validates the container layout.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_BYTES {
            return Err(Error::TruncatedStream {
                expected: HEADER_BYTES,
                found: bytes.len(),
            });
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes[4] != VERSION {
            return Err(Error::UnsupportedVersion(bytes[4]));
        }
        let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]) as usize;
        let width = u16_at(5);
        let height = u16_at(7);
        let original_width = u16_at(9);
        let original_height = u16_at(11);
        let table_id = TableId::from_u8(bytes[13])?;
        let words = u32::from_le_bytes([bytes[14], bytes[15], bytes[16], bytes[17]]) as usize;
        let expected = HEADER_BYTES + 4 * words;
        if bytes.len() < expected {
            return Err(Error::TruncatedStream {
                expected,
                found: bytes.len(),
            });
        }
        if bytes.len() > expected {
            return Err(Error::CorruptStream("trailing bytes after payload"));
        }
        let payload = bytes[HEADER_BYTES..]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(CompressedStream {
            width,
            height,
            original_width,
            original_height,
            table_id,
            payload,
        })
    }
}

/// Encoder-side statistics for one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameStats {
    pub bits_original: u64,
    /// Whole-stream size (header + payload) in bits.
    pub bits_compressed: u64,
    /// Entropy-coded bits before word padding.
    pub payload_bits: u64,
    pub total_blocks: u64,
    pub zero_ac_blocks: u64,
}

impl FrameStats {
    pub fn compression_ratio(&self) -> f64 {
        self.bits_original as f64 / self.bits_compressed as f64
    }

    pub fn zero_ac_fraction(&self) -> f64 {
        if self.total_blocks == 0 {
            0.0
        } else {
            self.zero_ac_blocks as f64 / self.total_blocks as f64
        }
    }
}

/// Reversible stand-in for the DCT when every quantization shift is zero:
/// along the zigzag path each value is replaced by its difference from the
/// previous one. Uniform blocks still collapse onto the Zero-AC fast path,
/// and the inverse is an exact prefix sum, which keeps the all-shifts-zero
/// mode bit-exact end to end (a rounded transform could not be).
fn bypass_forward(block: &[i16; 16]) -> [i16; 16] {
    let seq = zigzag(block);
    let mut diff = [0i16; 16];
    diff[0] = seq[0];
    for i in 1..16 {
        diff[i] = seq[i].wrapping_sub(seq[i - 1]);
    }
    unzigzag(&diff)
}

fn bypass_inverse(block: &[i16; 16]) -> [i16; 16] {
    let diff = zigzag(block);
    let mut seq = [0i16; 16];
    seq[0] = diff[0];
    for i in 1..16 {
        seq[i] = seq[i - 1].wrapping_add(diff[i]);
    }
    unzigzag(&seq)
}

struct CodingContexts {
    luma_dc: RiceContext,
    luma_ac: RiceContext,
    chroma_dc: RiceContext,
    chroma_ac: RiceContext,
}

impl CodingContexts {
    fn new() -> Self {
        Self {
            luma_dc: RiceContext::new(),
            luma_ac: RiceContext::new(),
            chroma_dc: RiceContext::new(),
            chroma_ac: RiceContext::new(),
        }
    }

    fn for_plane(&mut self, id: PlaneId) -> (&mut RiceContext, &mut RiceContext) {
        if id.is_chroma() {
            (&mut self.chroma_dc, &mut self.chroma_ac)
        } else {
            (&mut self.luma_dc, &mut self.luma_ac)
        }
    }
}

fn dc_reset(id: PlaneId) -> i32 {
    if id.is_chroma() {
        DC_RESET_CHROMA
    } else {
        DC_RESET_LUMA
    }
}

/// Runs the full pipeline: color transform, per-block DCT, quantization,
/// zigzag, and adaptive entropy coding. Output is deterministic for
/// identical inputs.
pub fn encode_frame(frame: &BayerFrame, tables: &TableSelection) -> (CompressedStream, FrameStats) {
    let (table_id, table) = tables.resolve();
    let bypass = table.is_lossless();
    let planes = forward_rct(frame);
    let mut sink = BitSink::new();
    let mut ctxs = CodingContexts::new();
    let mut total_blocks = 0u64;
    let mut zero_ac_blocks = 0u64;

    for id in PlaneId::ORDER {
        let plane = planes.plane(id);
        let shifts = table.shifts_for(id);
        let (dc_ctx, ac_ctx) = ctxs.for_plane(id);
        let mut prev_dc = dc_reset(id);
        let (bw, bh) = plane.block_grid();
        for brow in 0..bh {
            for bcol in 0..bw {
                let block = plane.block(brow, bcol);
                let mut coeffs = if bypass {
                    bypass_forward(&block)
                } else {
                    fdct4x4(&block)
                };
                quantize_block(&mut coeffs, shifts);
                let seq = zigzag(&coeffs);
                total_blocks += 1;
                if seq[1..].iter().all(|&v| v == 0) {
                    zero_ac_blocks += 1;
                }
                prev_dc = encode_block(&mut sink, &seq, dc_ctx, ac_ctx, prev_dc);
            }
        }
    }

    let (payload, payload_bits) = sink.finish();
    let stream = CompressedStream {
        width: frame.width(),
        height: frame.height(),
        original_width: frame.original_width(),
        original_height: frame.original_height(),
        table_id,
        payload,
    };
    let stats = FrameStats {
        bits_original: frame.bits(),
        bits_compressed: 8 * stream.byte_len() as u64,
        payload_bits,
        total_blocks,
        zero_ac_blocks,
    };
    (stream, stats)
}

/// Decoder output: the reconstructed padded frame, carrying the original
/// dimensions for cropping at the output boundary, plus the number of
/// samples clamped into [0, 255].
#[derive(Debug, Clone)]
pub struct DecodedFrame {
    pub frame: BayerFrame,
    pub clamp_events: u64,
}

/// Exact inverse pipeline. For table id 2 the caller must supply the same
/// external tables used at encode time.
pub fn decode_frame(
    stream: &CompressedStream,
    external: Option<&QuantTable>,
) -> Result<DecodedFrame> {
    let table = match stream.table_id {
        TableId::Lossless => QuantTable::lossless(),
        TableId::Default => QuantTable::default_tables(),
        TableId::External => external
            .cloned()
            .ok_or(Error::BadQuantTable("stream needs external tables"))?,
    };
    if stream.width == 0
        || stream.height == 0
        || !stream.width.is_multiple_of(8)
        || !stream.height.is_multiple_of(8)
        || stream.original_width > stream.width
        || stream.original_height > stream.height
    {
        return Err(Error::CorruptStream("implausible header dimensions"));
    }

    let bypass = table.is_lossless();
    let pw = stream.width / 2;
    let ph = stream.height / 2;
    let mut planes = PlaneSet::zeroed(pw, ph);
    let mut source = BitSource::new(&stream.payload);
    let mut ctxs = CodingContexts::new();

    for id in PlaneId::ORDER {
        let shifts = *QuantTable::shifts_for(&table, id);
        let plane = planes.plane_mut(id);
        let (dc_ctx, ac_ctx) = ctxs.for_plane(id);
        let mut prev_dc = dc_reset(id);
        let (bw, bh) = plane.block_grid();
        for brow in 0..bh {
            for bcol in 0..bw {
                let (seq, dc) = decode_block(&mut source, dc_ctx, ac_ctx, prev_dc)?;
                prev_dc = dc;
                let mut coeffs = unzigzag(&seq);
                dequantize_block(&mut coeffs, &shifts);
                let block = if bypass {
                    bypass_inverse(&coeffs)
                } else {
                    idct4x4(&coeffs)
                };
                plane.set_block(brow, bcol, &block);
            }
        }
    }

    // everything after the content must be word padding
    let pad = 32 * stream.payload.len() as u64 - source.bits_read();
    if pad >= 32 {
        return Err(Error::CorruptStream("payload longer than frame content"));
    }

    let inverse = inverse_rct(&planes);
    let mut frame = inverse.frame;
    frame.set_original_size(stream.original_width, stream.original_height);
    Ok(DecodedFrame {
        frame,
        clamp_events: inverse.clamp_events,
    })
}
