//! Power-of-two coefficient quantization.
//!
//! Divisors are restricted to 2^s so quantization is a shift; rounding is
//! half-away-from-zero, which keeps the error symmetric for signed
//! coefficients and bounded by 2^(s-1).

use crate::error::{Error, Result};
use crate::frame::PlaneId;

/// Largest allowed shift.
pub const MAX_SHIFT: u8 = 8;

/// Shift table identifier carried in the compressed header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableId {
    /// All shifts zero: the codec is exactly lossless.
    Lossless = 0,
    /// The built-in default tables.
    Default = 1,
    /// Tables supplied out of band (a table file next to the stream).
    External = 2,
}

impl TableId {
    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            0 => Ok(TableId::Lossless),
            1 => Ok(TableId::Default),
            2 => Ok(TableId::External),
            _ => Err(Error::BadQuantTable("unknown table identifier")),
        }
    }
}

/// Per-channel-class shift tables; Y and Dg use the luma class, Cb and Cr
/// the chroma class. Shifts are stored in raster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantTable {
    luma: [u8; 16],
    chroma: [u8; 16],
}

/// Default luma shifts by zigzag position: a monotone-in-frequency ladder.
pub const DEFAULT_LUMA_ZIGZAG: [u8; 16] = [0, 1, 1, 2, 1, 2, 2, 3, 2, 2, 3, 3, 3, 3, 3, 4];

impl QuantTable {
    /// Builds a table pair from zigzag-ordered shift lists.
    pub fn from_zigzag_shifts(luma: &[u8; 16], chroma: &[u8; 16]) -> Result<Self> {
        use crate::entropy::ZIGZAG;
        let mut table = QuantTable {
            luma: [0; 16],
            chroma: [0; 16],
        };
        for (pos, &raster) in ZIGZAG.iter().enumerate() {
            if luma[pos] > MAX_SHIFT || chroma[pos] > MAX_SHIFT {
                return Err(Error::BadQuantTable("shift exceeds 8"));
            }
            table.luma[raster] = luma[pos];
            table.chroma[raster] = chroma[pos];
        }
        Ok(table)
    }

    /// All-zero shifts: quantization becomes the identity.
    pub fn lossless() -> Self {
        QuantTable {
            luma: [0; 16],
            chroma: [0; 16],
        }
    }

    /// Built-in tables: the luma ladder above, chroma one step coarser.
    pub fn default_tables() -> Self {
        let mut chroma = DEFAULT_LUMA_ZIGZAG;
        for s in chroma.iter_mut() {
            *s = (*s + 1).min(MAX_SHIFT);
        }
        Self::from_zigzag_shifts(&DEFAULT_LUMA_ZIGZAG, &chroma).expect("defaults are in range")
    }

    /// Raster-order shifts for the class used by `plane`.
    pub fn shifts_for(&self, plane: PlaneId) -> &[u8; 16] {
        if plane.is_chroma() {
            &self.chroma
        } else {
            &self.luma
        }
    }

    /// Zigzag-ordered shift lists (luma, chroma), the external file layout.
    pub fn to_zigzag_shifts(&self) -> ([u8; 16], [u8; 16]) {
        use crate::entropy::ZIGZAG;
        let mut luma = [0u8; 16];
        let mut chroma = [0u8; 16];
        for (pos, &raster) in ZIGZAG.iter().enumerate() {
            luma[pos] = self.luma[raster];
            chroma[pos] = self.chroma[raster];
        }
        (luma, chroma)
    }

    pub fn is_lossless(&self) -> bool {
        self.luma.iter().all(|&s| s == 0) && self.chroma.iter().all(|&s| s == 0)
    }
}

/// Quantizes one value: sign(x) * ((|x| + 2^(s-1)) >> s); identity at s = 0.
#[inline]
pub fn quantize_value(x: i32, shift: u8) -> i32 {
    if shift == 0 {
        return x;
    }
    let half = 1i32 << (shift - 1);
    let q = (x.abs() + half) >> shift;
    if x < 0 {
        -q
    } else {
        q
    }
}

/// Inverse of [`quantize_value`]: q << s.
#[inline]
pub fn dequantize_value(q: i32, shift: u8) -> i32 {
    q << shift
}

/// Quantizes a coefficient block in place with raster-order shifts.
pub fn quantize_block(coeffs: &mut [i16; 16], shifts: &[u8; 16]) {
    for (v, &s) in coeffs.iter_mut().zip(shifts.iter()) {
        *v = quantize_value(*v as i32, s) as i16;
    }
}

/// Dequantizes a coefficient block in place.
pub fn dequantize_block(coeffs: &mut [i16; 16], shifts: &[u8; 16]) {
    for (v, &s) in coeffs.iter_mut().zip(shifts.iter()) {
        *v = dequantize_value(*v as i32, s) as i16;
    }
}
