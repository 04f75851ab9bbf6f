//! Fixed-point 4x4 DCT-II and its inverse.
//!
//! The transform core runs entirely on integer adds and shifts; the
//! irrational basis normalization is deferred to a single post-scaling
//! multiply per coefficient by the Q12 scale matrix. Forward output is on
//! the orthonormal DCT-II scale, so a constant block of value `c` produces
//! DC = 4c and zero AC, and `idct4x4(fdct4x4(b))` reconstructs `b` within
//! one intensity step.

/// Q12 basis scale: 2^12.
pub const SCALE_BASE: i64 = 4096;
/// Q12 orthogonality factor: round(sqrt(2) * 2^12).
pub const SCALE_ORTHO: i64 = 5793;
/// Q12 combined factor: 2 * 2^12.
pub const SCALE_COMBINED: i64 = 8192;

/// Per-coefficient post-scale, S(i,j) = round(k(i) * k(j) * 2^12) with
/// k(0) = 1 and k(i != 0) = sqrt(2).
pub const SCALE_MATRIX: [i64; 16] = [
    SCALE_BASE,
    SCALE_ORTHO,
    SCALE_ORTHO,
    SCALE_ORTHO,
    SCALE_ORTHO,
    SCALE_COMBINED,
    SCALE_COMBINED,
    SCALE_COMBINED,
    SCALE_ORTHO,
    SCALE_COMBINED,
    SCALE_COMBINED,
    SCALE_COMBINED,
    SCALE_ORTHO,
    SCALE_COMBINED,
    SCALE_COMBINED,
    SCALE_COMBINED,
];

// Butterfly constants in Q14, realized as shift-add chains so the core stays
// free of general multiplies.

/// v * 15137, 15137 = round(cos(pi/8) * 2^14).
#[inline]
fn mul_cos1(v: i64) -> i64 {
    (v << 13) + (v << 12) + (v << 11) + (v << 9) + (v << 8) + (v << 5) + v
}

/// v * 11585, 11585 = round(sqrt(1/2) * 2^14).
#[inline]
fn mul_cos2(v: i64) -> i64 {
    (v << 13) + (v << 11) + (v << 10) + (v << 8) + (v << 6) + v
}

/// v * 6270, 6270 = round(cos(3pi/8) * 2^14).
#[inline]
fn mul_cos3(v: i64) -> i64 {
    (v << 12) + (v << 11) + (v << 6) + (v << 5) + (v << 4) + (v << 3) + (v << 2) + (v << 1)
}

/// One forward 1-D pass over (x0..x3); output carries 14 fractional bits.
#[inline]
fn forward_pass(x0: i64, x1: i64, x2: i64, x3: i64) -> [i64; 4] {
    let s0 = x0 + x3;
    let s1 = x1 + x2;
    let d0 = x0 - x3;
    let d1 = x1 - x2;
    [
        (s0 + s1) << 14,
        mul_cos1(d0) + mul_cos3(d1),
        mul_cos2(s0 - s1),
        mul_cos3(d0) - mul_cos1(d1),
    ]
}

/// One inverse 1-D pass (transposed flow); adds 14 fractional bits.
#[inline]
fn inverse_pass(w0: i64, w1: i64, w2: i64, w3: i64) -> [i64; 4] {
    let e0 = (w0 << 14) + mul_cos2(w2);
    let e1 = (w0 << 14) - mul_cos2(w2);
    let o0 = mul_cos1(w1) + mul_cos3(w3);
    let o1 = mul_cos3(w1) - mul_cos1(w3);
    [e0 + o0, e1 + o1, e1 - o1, e0 - o0]
}

/// Forward 4x4 DCT of one block (raster order), orthonormal scale.
pub fn fdct4x4(block: &[i16; 16]) -> [i16; 16] {
    let mut t = [0i64; 16];
    for r in 0..4 {
        let row = forward_pass(
            block[r * 4] as i64,
            block[r * 4 + 1] as i64,
            block[r * 4 + 2] as i64,
            block[r * 4 + 3] as i64,
        );
        t[r * 4..r * 4 + 4].copy_from_slice(&row);
    }
    let mut out = [0i16; 16];
    for c in 0..4 {
        let col = forward_pass(t[c], t[4 + c], t[8 + c], t[12 + c]);
        for r in 0..4 {
            // core carries 28 fractional bits; the Q12 scale and the /4
            // orthonormal fold make the descale shift 12 + 28 + 2 = 42
            let scaled = col[r] * SCALE_MATRIX[r * 4 + c];
            out[r * 4 + c] = ((scaled + (1 << 41)) >> 42) as i16;
        }
    }
    out
}

/// Inverse of [`fdct4x4`]: orthonormal-scale coefficients back to samples.
pub fn idct4x4(coeffs: &[i16; 16]) -> [i16; 16] {
    // pre-scale by S(i,j): this is exactly the a(i)*a(j) inverse basis
    // weighting carried at 14 fractional bits
    let mut w = [0i64; 16];
    for i in 0..16 {
        w[i] = coeffs[i] as i64 * SCALE_MATRIX[i];
    }
    let mut t = [0i64; 16];
    for c in 0..4 {
        let col = inverse_pass(w[c], w[4 + c], w[8 + c], w[12 + c]);
        for r in 0..4 {
            t[r * 4 + c] = col[r];
        }
    }
    let mut out = [0i16; 16];
    for r in 0..4 {
        let row = inverse_pass(t[r * 4], t[r * 4 + 1], t[r * 4 + 2], t[r * 4 + 3]);
        for c in 0..4 {
            out[r * 4 + c] = ((row[c] + (1 << 41)) >> 42) as i16;
        }
    }
    out
}
