//! Compression and fidelity metrics.
//!
//! PSNR is computed on the Bayer mosaic domain (the codec never leaves it);
//! published figures measured on demosaicked RGB are not directly comparable.

use crate::error::{Error, Result};

/// Original size over compressed size; > 1 means the stream shrank.
pub fn compression_ratio(original_bits: u64, compressed_bits: u64) -> Result<f64> {
    if original_bits == 0 || compressed_bits == 0 {
        return Err(Error::BadParameter("sizes must be positive"));
    }
    Ok(original_bits as f64 / compressed_bits as f64)
}

/// Fraction of the original size that was saved: 1 - 1/CR.
pub fn saved_fraction(cr: f64) -> f64 {
    1.0 - 1.0 / cr
}

/// Mean squared error between two equally sized 8-bit images.
pub fn mse(a: &[u8], b: &[u8]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::BadBufferLength {
            expected: a.len(),
            found: b.len(),
        });
    }
    let sum: u64 = a
        .iter()
        .zip(b.iter())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / a.len() as f64)
}

/// Peak signal-to-noise ratio in dB; infinite for a lossless reconstruction.
pub fn psnr(mse: f64, max_value: f64) -> f64 {
    if mse <= 0.0 {
        f64::INFINITY
    } else {
        10.0 * libm::log10(max_value * max_value / mse)
    }
}

/// Per-frame metric bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameMetrics {
    pub bits_original: u64,
    pub bits_compressed: u64,
    pub cr: f64,
    pub saved_fraction: f64,
    pub mse: f64,
    pub psnr: f64,
}

impl FrameMetrics {
    pub fn new(
        bits_original: u64,
        bits_compressed: u64,
        original: &[u8],
        reconstructed: &[u8],
    ) -> Result<Self> {
        let cr = compression_ratio(bits_original, bits_compressed)?;
        let mse = mse(original, reconstructed)?;
        Ok(FrameMetrics {
            bits_original,
            bits_compressed,
            cr,
            saved_fraction: saved_fraction(cr),
            mse,
            psnr: psnr(mse, 255.0),
        })
    }
}
