//! Image containers: RGGB mosaic frames, component plane sets, RGB input
//! images, and the macro-block grid.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Macro-blocks are 8x8 mosaic pixels, i.e. 4x4 samples per component plane.
pub const MACROBLOCK: usize = 8;
/// Transform block edge in plane samples.
pub const BLOCK: usize = 4;

/// Color recorded at a mosaic site under the fixed RGGB phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfaColor {
    R,
    G1,
    G2,
    B,
}

/// RGGB phase: R at even row/even col, G1 at even/odd, G2 at odd/even,
/// B at odd/odd.
pub fn cfa_color_at(row: usize, col: usize) -> CfaColor {
    match (row & 1, col & 1) {
        (0, 0) => CfaColor::R,
        (0, 1) => CfaColor::G1,
        (1, 0) => CfaColor::G2,
        _ => CfaColor::B,
    }
}

/// An 8-bit RGGB mosaic, row-major, dimensions padded to multiples of 8.
///
/// `original_width`/`original_height` carry the pre-padding size so a decoder
/// or writer can crop back; they equal the padded size for aligned inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BayerFrame {
    width: usize,
    height: usize,
    original_width: usize,
    original_height: usize,
    samples: Vec<u8>,
}

impl BayerFrame {
    /// Wraps an already block-aligned mosaic buffer.
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if width < MACROBLOCK || height < MACROBLOCK {
            return Err(Error::BadDimensions {
                width,
                height,
                reason: "below one macro-block",
            });
        }
        if !width.is_multiple_of(MACROBLOCK) || !height.is_multiple_of(MACROBLOCK) {
            return Err(Error::BadDimensions {
                width,
                height,
                reason: "not a multiple of the macro-block size",
            });
        }
        // container headers carry dimensions as u16
        if width > 65528 || height > 65528 {
            return Err(Error::BadDimensions {
                width,
                height,
                reason: "exceeds the container's 16-bit dimension fields",
            });
        }
        if samples.len() != width * height {
            return Err(Error::BadBufferLength {
                expected: width * height,
                found: samples.len(),
            });
        }
        Ok(Self {
            width,
            height,
            original_width: width,
            original_height: height,
            samples,
        })
    }

    /// Builds a frame from an arbitrary even-dimension mosaic, replicating the
    /// right/bottom edge up to the next macro-block multiple. The original
    /// size is recorded for later cropping.
    pub fn with_padding(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || !width.is_multiple_of(2) || !height.is_multiple_of(2) {
            return Err(Error::BadDimensions {
                width,
                height,
                reason: "mosaic dimensions must be even and nonzero",
            });
        }
        if samples.len() != width * height {
            return Err(Error::BadBufferLength {
                expected: width * height,
                found: samples.len(),
            });
        }
        let pw = width.next_multiple_of(MACROBLOCK).max(MACROBLOCK);
        let ph = height.next_multiple_of(MACROBLOCK).max(MACROBLOCK);
        if pw == width && ph == height {
            let mut frame = Self::new(width, height, samples)?;
            frame.original_width = width;
            frame.original_height = height;
            return Ok(frame);
        }
        let mut padded = vec![0u8; pw * ph];
        for y in 0..ph {
            let sy = y.min(height - 1);
            for x in 0..pw {
                let sx = x.min(width - 1);
                padded[y * pw + x] = samples[sy * width + sx];
            }
        }
        let mut frame = Self::new(pw, ph, padded)?;
        frame.original_width = width;
        frame.original_height = height;
        Ok(frame)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn original_width(&self) -> usize {
        self.original_width
    }

    pub fn original_height(&self) -> usize {
        self.original_height
    }

    /// Overrides the recorded pre-padding size (used when reconstructing a
    /// frame from a compressed header).
    pub fn set_original_size(&mut self, width: usize, height: usize) {
        self.original_width = width;
        self.original_height = height;
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn sample(&self, row: usize, col: usize) -> u8 {
        self.samples[row * self.width + col]
    }

    /// Uncompressed size of the padded mosaic in bits (8 bits per sample).
    pub fn bits(&self) -> u64 {
        (self.width * self.height * 8) as u64
    }

    /// Copies out the original (pre-padding) region. The result is a plain
    /// mosaic, not a codec-ready frame: its dimensions need not be
    /// block-aligned.
    pub fn crop_to_original(&self) -> CroppedMosaic {
        let mut out = Vec::with_capacity(self.original_width * self.original_height);
        for y in 0..self.original_height {
            let row = &self.samples[y * self.width..y * self.width + self.original_width];
            out.extend_from_slice(row);
        }
        CroppedMosaic {
            width: self.original_width,
            height: self.original_height,
            samples: out,
        }
    }

    /// Macro-block grid size as (columns, rows).
    pub fn macroblock_grid(&self) -> (usize, usize) {
        (self.width / MACROBLOCK, self.height / MACROBLOCK)
    }
}

/// The pre-padding region of a frame, as extracted by
/// [`BayerFrame::crop_to_original`]. Dimensions are even but not necessarily
/// macro-block aligned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CroppedMosaic {
    pub width: usize,
    pub height: usize,
    pub samples: Vec<u8>,
}

/// 3-channel 8-bit interleaved RGB image; input to mosaicking and the
/// bubble analyzer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    /// Interleaved r,g,b triples, row-major.
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::BadBufferLength {
                expected: width * height * 3,
                found: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn pixel(&self, row: usize, col: usize) -> (u8, u8, u8) {
        let i = (row * self.width + col) * 3;
        (self.data[i], self.data[i + 1], self.data[i + 2])
    }
}

/// Subsamples an RGB image through the RGGB color filter array: every output
/// site keeps the single channel its CFA position dictates.
pub fn mosaic_rggb(rgb: &RgbImage) -> Result<BayerFrame> {
    if !rgb.width.is_multiple_of(2) || !rgb.height.is_multiple_of(2) {
        return Err(Error::BadDimensions {
            width: rgb.width,
            height: rgb.height,
            reason: "CFA subsampling needs even dimensions",
        });
    }
    let mut samples = Vec::with_capacity(rgb.width * rgb.height);
    for y in 0..rgb.height {
        for x in 0..rgb.width {
            let (r, g, b) = rgb.pixel(y, x);
            samples.push(match cfa_color_at(y, x) {
                CfaColor::R => r,
                CfaColor::G1 | CfaColor::G2 => g,
                CfaColor::B => b,
            });
        }
    }
    BayerFrame::with_padding(rgb.width, rgb.height, samples)
}

/// Identifies one of the four component planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneId {
    Y,
    Dg,
    Cb,
    Cr,
}

impl PlaneId {
    /// Stream order: luminance, green difference, then the two chroma planes.
    pub const ORDER: [PlaneId; 4] = [PlaneId::Y, PlaneId::Dg, PlaneId::Cb, PlaneId::Cr];

    /// Y and Dg are coded with the luma tables/contexts, Cb and Cr with the
    /// chroma ones.
    pub fn is_chroma(self) -> bool {
        matches!(self, PlaneId::Cb | PlaneId::Cr)
    }
}

/// One 16-bit component plane at half the mosaic resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<i16>,
}

impl Plane {
    pub fn zeroed(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0; width * height],
        }
    }

    pub fn at(&self, row: usize, col: usize) -> i16 {
        self.data[row * self.width + col]
    }

    /// Copies the 4x4 block whose top-left sample is (`brow`*4, `bcol`*4).
    pub fn block(&self, brow: usize, bcol: usize) -> [i16; 16] {
        let mut out = [0i16; 16];
        for r in 0..BLOCK {
            let base = (brow * BLOCK + r) * self.width + bcol * BLOCK;
            out[r * BLOCK..(r + 1) * BLOCK].copy_from_slice(&self.data[base..base + BLOCK]);
        }
        out
    }

    pub fn set_block(&mut self, brow: usize, bcol: usize, values: &[i16; 16]) {
        for r in 0..BLOCK {
            let base = (brow * BLOCK + r) * self.width + bcol * BLOCK;
            self.data[base..base + BLOCK].copy_from_slice(&values[r * BLOCK..(r + 1) * BLOCK]);
        }
    }

    /// Transform block grid as (columns, rows).
    pub fn block_grid(&self) -> (usize, usize) {
        (self.width / BLOCK, self.height / BLOCK)
    }
}

/// The four planes produced by the reversible color transform.
///
/// Value ranges: Y in [0,255], Dg in [-255,255], Cb/Cr in [-127,383]
/// (the chroma offset of 128 is included and deliberately not clamped).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneSet {
    pub y: Plane,
    pub dg: Plane,
    pub cb: Plane,
    pub cr: Plane,
}

impl PlaneSet {
    pub fn zeroed(plane_width: usize, plane_height: usize) -> Self {
        Self {
            y: Plane::zeroed(plane_width, plane_height),
            dg: Plane::zeroed(plane_width, plane_height),
            cb: Plane::zeroed(plane_width, plane_height),
            cr: Plane::zeroed(plane_width, plane_height),
        }
    }

    pub fn plane(&self, id: PlaneId) -> &Plane {
        match id {
            PlaneId::Y => &self.y,
            PlaneId::Dg => &self.dg,
            PlaneId::Cb => &self.cb,
            PlaneId::Cr => &self.cr,
        }
    }

    pub fn plane_mut(&mut self, id: PlaneId) -> &mut Plane {
        match id {
            PlaneId::Y => &mut self.y,
            PlaneId::Dg => &mut self.dg,
            PlaneId::Cb => &mut self.cb,
            PlaneId::Cr => &mut self.cr,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rggb_layout() {
        assert_eq!(cfa_color_at(0, 0), CfaColor::R);
        assert_eq!(cfa_color_at(0, 1), CfaColor::G1);
        assert_eq!(cfa_color_at(1, 0), CfaColor::G2);
        assert_eq!(cfa_color_at(1, 1), CfaColor::B);
        // periodic
        assert_eq!(cfa_color_at(2, 4), CfaColor::R);
        assert_eq!(cfa_color_at(3, 5), CfaColor::B);
    }

    #[test]
    fn rejects_unaligned_and_short_buffers() {
        assert!(BayerFrame::new(10, 10, vec![0; 100]).is_err());
        assert!(BayerFrame::new(8, 8, vec![0; 63]).is_err());
        assert!(BayerFrame::new(4, 4, vec![0; 16]).is_err());
        assert!(BayerFrame::new(8, 8, vec![0; 64]).is_ok());
        assert!(BayerFrame::new(65536, 8, vec![0; 65536 * 8]).is_err());
    }

    #[test]
    fn padding_replicates_edges_and_records_original() {
        let mut samples = Vec::new();
        for y in 0..10u8 {
            for x in 0..10u8 {
                samples.push(y * 10 + x);
            }
        }
        let frame = BayerFrame::with_padding(10, 10, samples).unwrap();
        assert_eq!((frame.width(), frame.height()), (16, 16));
        assert_eq!((frame.original_width(), frame.original_height()), (10, 10));
        // replicated right edge and bottom edge
        assert_eq!(frame.sample(0, 9), 9);
        assert_eq!(frame.sample(0, 15), 9);
        assert_eq!(frame.sample(9, 0), 90);
        assert_eq!(frame.sample(15, 0), 90);
        assert_eq!(frame.sample(15, 15), 99);

        let cropped = frame.crop_to_original();
        assert_eq!((cropped.width, cropped.height), (10, 10));
        assert_eq!(cropped.samples[9 * 10 + 9], 99);
    }

    #[test]
    fn padding_rejects_odd_dimensions() {
        assert!(BayerFrame::with_padding(9, 10, vec![0; 90]).is_err());
        assert!(BayerFrame::with_padding(10, 9, vec![0; 90]).is_err());
    }

    #[test]
    fn mosaic_uniform_rgb_places_channels_by_parity() {
        let data: Vec<u8> = std::iter::repeat_n([10u8, 20, 30], 8 * 8)
            .flatten()
            .collect();
        let rgb = RgbImage::new(8, 8, data).unwrap();
        let frame = mosaic_rggb(&rgb).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                let want = match cfa_color_at(y, x) {
                    CfaColor::R => 10,
                    CfaColor::G1 | CfaColor::G2 => 20,
                    CfaColor::B => 30,
                };
                assert_eq!(frame.sample(y, x), want);
            }
        }
    }

    #[test]
    fn mosaic_pure_red_hits_only_even_even_sites() {
        let data: Vec<u8> = std::iter::repeat_n([255u8, 0, 0], 8 * 8)
            .flatten()
            .collect();
        let rgb = RgbImage::new(8, 8, data).unwrap();
        let frame = mosaic_rggb(&rgb).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                let want = if y % 2 == 0 && x % 2 == 0 { 255 } else { 0 };
                assert_eq!(frame.sample(y, x), want);
            }
        }
    }

    #[test]
    fn mosaic_2x2_distinct_channels() {
        // R=(1,2,3) G=(4,5,6)/(7,8,9) B=(10,11,12); padded up to 8x8 afterwards
        let data = vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];
        let rgb = RgbImage::new(2, 2, data).unwrap();
        let frame = mosaic_rggb(&rgb).unwrap();
        assert_eq!(frame.sample(0, 0), 1); // R channel of pixel (0,0)
        assert_eq!(frame.sample(0, 1), 5); // G of (0,1)
        assert_eq!(frame.sample(1, 0), 8); // G of (1,0)
        assert_eq!(frame.sample(1, 1), 12); // B of (1,1)
        assert_eq!((frame.original_width(), frame.original_height()), (2, 2));
    }

    #[test]
    fn mosaic_rejects_odd() {
        let rgb = RgbImage::new(3, 2, vec![0; 18]).unwrap();
        assert!(mosaic_rggb(&rgb).is_err());
    }

    #[test]
    fn block_grid_covers_every_pixel_once() {
        let frame = BayerFrame::new(24, 16, vec![0; 24 * 16]).unwrap();
        let (bx, by) = frame.macroblock_grid();
        assert_eq!(
            bx * by * MACROBLOCK * MACROBLOCK,
            frame.width() * frame.height()
        );
    }

    #[test]
    fn plane_block_roundtrip() {
        let mut plane = Plane::zeroed(8, 8);
        let block: [i16; 16] = core::array::from_fn(|i| i as i16 - 8);
        plane.set_block(1, 1, &block);
        assert_eq!(plane.block(1, 1), block);
        assert_eq!(plane.at(4, 4), -8);
        assert_eq!(plane.block(0, 0), [0; 16]);
    }
}
