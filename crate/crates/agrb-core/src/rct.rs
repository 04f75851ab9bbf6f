//! Reversible integer color transform between an RGGB mosaic and its four
//! component planes.
//!
//! Each 2x2 Bayer cell (R, G1, G2, B) maps to one sample in each plane. The
//! green pair is carried by a lifting step: the difference Dg and the mean
//! Gm = G2 + (Dg >> 1) together recover both greens exactly, so the whole
//! transform is invertible with no tolerance. Chroma is offset by 128 and
//! intentionally left unclamped; clamping would destroy reversibility.

use crate::frame::{BayerFrame, PlaneSet};

/// Chroma offset applied to Cb and Cr.
pub const CHROMA_OFFSET: i32 = 128;

/// Forward transform of one cell. Shift-and-add only.
#[inline]
pub fn forward_cell(r: i32, g1: i32, g2: i32, b: i32) -> (i32, i32, i32, i32) {
    let dg = g1 - g2;
    let gm = g2 + (dg >> 1);
    let y = gm;
    let cb = b - gm + CHROMA_OFFSET;
    let cr = r - gm + CHROMA_OFFSET;
    (y, dg, cb, cr)
}

/// Exact integer inverse of [`forward_cell`]. Shift-and-add only.
#[inline]
pub fn inverse_cell(y: i32, dg: i32, cb: i32, cr: i32) -> (i32, i32, i32, i32) {
    let gm = y;
    let g2 = gm - (dg >> 1);
    let g1 = g2 + dg;
    let b = cb - CHROMA_OFFSET + gm;
    let r = cr - CHROMA_OFFSET + gm;
    (r, g1, g2, b)
}

/// Transforms a mosaic frame into its four half-resolution planes.
pub fn forward_rct(frame: &BayerFrame) -> PlaneSet {
    let pw = frame.width() / 2;
    let ph = frame.height() / 2;
    let mut planes = PlaneSet::zeroed(pw, ph);
    for cy in 0..ph {
        for cx in 0..pw {
            let r = frame.sample(2 * cy, 2 * cx) as i32;
            let g1 = frame.sample(2 * cy, 2 * cx + 1) as i32;
            let g2 = frame.sample(2 * cy + 1, 2 * cx) as i32;
            let b = frame.sample(2 * cy + 1, 2 * cx + 1) as i32;
            let (y, dg, cb, cr) = forward_cell(r, g1, g2, b);
            let i = cy * pw + cx;
            planes.y.data[i] = y as i16;
            planes.dg.data[i] = dg as i16;
            planes.cb.data[i] = cb as i16;
            planes.cr.data[i] = cr as i16;
        }
    }
    planes
}

/// Result of the inverse transform: the mosaic plus the number of samples
/// that had to be clamped into [0, 255]. Clamping can only occur after lossy
/// coefficient reconstruction; on exact plane data the count is zero.
pub struct InverseResult {
    pub frame: BayerFrame,
    pub clamp_events: u64,
}

/// Reconstructs the mosaic from a plane set, clamping each sample to [0, 255]
/// and counting every clamp event.
pub fn inverse_rct(planes: &PlaneSet) -> InverseResult {
    let pw = planes.y.width;
    let ph = planes.y.height;
    let width = pw * 2;
    let height = ph * 2;
    let mut samples = alloc::vec![0u8; width * height];
    let mut clamp_events = 0u64;
    let mut clamp = |v: i32| -> u8 {
        if v < 0 {
            clamp_events += 1;
            0
        } else if v > 255 {
            clamp_events += 1;
            255
        } else {
            v as u8
        }
    };
    for cy in 0..ph {
        for cx in 0..pw {
            let i = cy * pw + cx;
            let (r, g1, g2, b) = inverse_cell(
                planes.y.data[i] as i32,
                planes.dg.data[i] as i32,
                planes.cb.data[i] as i32,
                planes.cr.data[i] as i32,
            );
            samples[2 * cy * width + 2 * cx] = clamp(r);
            samples[2 * cy * width + 2 * cx + 1] = clamp(g1);
            samples[(2 * cy + 1) * width + 2 * cx] = clamp(g2);
            samples[(2 * cy + 1) * width + 2 * cx + 1] = clamp(b);
        }
    }
    let frame = BayerFrame::new(width, height, samples).expect("plane dims come from a frame");
    InverseResult {
        frame,
        clamp_events,
    }
}
