//! Zigzag ordering and adaptive Golomb-Rice coding of coefficient blocks.
//!
//! The Rice parameter k is chosen from a running context (accumulated mapped
//! magnitude A over symbol count N) as the smallest k with N*2^k >= A, and
//! both halve once N reaches 64 so the coder tracks local statistics. DC is
//! DPCM-coded against the previous block of the same plane; a single flag bit
//! short-circuits blocks whose 15 AC coefficients are all zero.

use crate::bitio::{BitSink, BitSource};
use crate::error::{Error, Result};

/// Zigzag scan for 4x4 blocks: output position -> raster index.
pub const ZIGZAG: [usize; 16] = [0, 1, 4, 8, 5, 2, 3, 6, 9, 12, 13, 10, 7, 11, 14, 15];

/// Largest usable Rice parameter.
pub const MAX_RICE_K: u32 = 24;
/// Unary runs longer than this are treated as stream corruption.
pub const MAX_UNARY_RUN: u32 = 1 << 15;
/// Context renormalization limit for N.
pub const RENORM_LIMIT: u32 = 64;

/// Reorders raster coefficients into zigzag sequence order.
pub fn zigzag(coeffs: &[i16; 16]) -> [i16; 16] {
    core::array::from_fn(|pos| coeffs[ZIGZAG[pos]])
}

/// Inverse of [`zigzag`].
pub fn unzigzag(seq: &[i16; 16]) -> [i16; 16] {
    let mut out = [0i16; 16];
    for (pos, &raster) in ZIGZAG.iter().enumerate() {
        out[raster] = seq[pos];
    }
    out
}

/// Interleaves signed values onto the non-negative integers:
/// 0, -1, 1, -2, 2 ... -> 0, 1, 2, 3, 4 ...
#[inline]
pub fn map_signed(v: i32) -> u32 {
    if v >= 0 {
        (v as u32) << 1
    } else {
        ((-(v as i64)) as u32 * 2) - 1
    }
}

/// Inverse of [`map_signed`].
#[inline]
pub fn unmap_signed(u: u32) -> i32 {
    if u & 1 == 0 {
        (u >> 1) as i32
    } else {
        -(((u >> 1) + 1) as i32)
    }
}

/// Emits the Rice code of `u` under parameter `k`: the quotient in unary
/// (ones, then a terminating zero) followed by the k low-order bits.
///
/// The quotient must stay within the decoder's runaway-run budget; block
/// coefficients are orders of magnitude below it.
pub fn rice_encode(sink: &mut BitSink, u: u32, k: u32) {
    debug_assert!(k <= MAX_RICE_K);
    let q = u >> k;
    debug_assert!(q <= MAX_UNARY_RUN, "symbol outside the codable domain");
    sink.write_unary(q);
    if k > 0 {
        sink.write_bits(u & ((1 << k) - 1), k);
    }
}

/// Decodes one Rice code; rejects runaway unary runs as corruption.
pub fn rice_decode(source: &mut BitSource<'_>, k: u32) -> Result<u32> {
    debug_assert!(k <= MAX_RICE_K);
    let mut q = 0u32;
    while source.read_bit()? == 1 {
        q += 1;
        if q > MAX_UNARY_RUN {
            return Err(Error::CorruptStream("runaway unary run"));
        }
    }
    let r = if k > 0 { source.read_bits(k)? } else { 0 };
    Ok((q << k) | r)
}

/// Running adaptation state: accumulated mapped magnitude over symbol count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiceContext {
    a: u64,
    n: u32,
}

impl Default for RiceContext {
    fn default() -> Self {
        Self::new()
    }
}

impl RiceContext {
    pub fn new() -> Self {
        RiceContext { a: 0, n: 1 }
    }

    /// Smallest k with N * 2^k >= A, capped at [`MAX_RICE_K`].
    pub fn k(&self) -> u32 {
        let mut k = 0;
        while k < MAX_RICE_K && ((self.n as u64) << k) < self.a {
            k += 1;
        }
        k
    }

    /// Accounts one coded symbol; halves A and N at the renormalization
    /// limit (N never drops below 1).
    pub fn update(&mut self, mapped: u32) {
        self.a += mapped as u64;
        self.n += 1;
        if self.n >= RENORM_LIMIT {
            self.a >>= 1;
            self.n = (self.n >> 1).max(1);
        }
    }

    pub fn accumulated(&self) -> u64 {
        self.a
    }

    pub fn count(&self) -> u32 {
        self.n
    }
}

/// Encodes one zigzag-ordered block: DC difference, the Zero-AC flag, and
/// (for mixed blocks) the 15 AC values. Returns the block's DC so the caller
/// can carry the DPCM predictor forward.
pub fn encode_block(
    sink: &mut BitSink,
    seq: &[i16; 16],
    dc_ctx: &mut RiceContext,
    ac_ctx: &mut RiceContext,
    prev_dc: i32,
) -> i32 {
    let dc = seq[0] as i32;
    let mapped_dc = map_signed(dc - prev_dc);
    rice_encode(sink, mapped_dc, dc_ctx.k());
    dc_ctx.update(mapped_dc);

    let all_zero = seq[1..].iter().all(|&v| v == 0);
    sink.write_bit(all_zero as u32);
    if !all_zero {
        for &ac in &seq[1..] {
            let mapped = map_signed(ac as i32);
            rice_encode(sink, mapped, ac_ctx.k());
            ac_ctx.update(mapped);
        }
    }
    dc
}

/// Mirror of [`encode_block`]; returns the zigzag-ordered block and its DC.
pub fn decode_block(
    source: &mut BitSource<'_>,
    dc_ctx: &mut RiceContext,
    ac_ctx: &mut RiceContext,
    prev_dc: i32,
) -> Result<([i16; 16], i32)> {
    let mapped_dc = rice_decode(source, dc_ctx.k())?;
    dc_ctx.update(mapped_dc);
    let dc = prev_dc + unmap_signed(mapped_dc);

    let mut seq = [0i16; 16];
    seq[0] = dc as i16;
    let all_zero = source.read_bit()? == 1;
    if !all_zero {
        for slot in seq[1..].iter_mut() {
            let mapped = rice_decode(source, ac_ctx.k())?;
            ac_ctx.update(mapped);
            *slot = unmap_signed(mapped) as i16;
        }
    }
    Ok((seq, dc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zigzag_permutation_matches_reference() {
        let raster: [i16; 16] = core::array::from_fn(|i| i as i16);
        assert_eq!(
            zigzag(&raster),
            [0, 1, 4, 8, 5, 2, 3, 6, 9, 12, 13, 10, 7, 11, 14, 15]
        );
        // it is a permutation
        let mut seen = [false; 16];
        for &i in ZIGZAG.iter() {
            assert!(!seen[i]);
            seen[i] = true;
        }
        assert_eq!(ZIGZAG[0], 0, "position 0 is DC");
    }

    #[test]
    fn zigzag_of_constant_block_is_constant() {
        assert_eq!(zigzag(&[7; 16]), [7; 16]);
    }

    #[test]
    fn signed_mapping_small_values() {
        assert_eq!(map_signed(0), 0);
        assert_eq!(map_signed(-1), 1);
        assert_eq!(map_signed(1), 2);
        assert_eq!(map_signed(-2), 3);
        assert_eq!(unmap_signed(0), 0);
        assert_eq!(unmap_signed(1), -1);
        assert_eq!(unmap_signed(2), 1);
    }

    #[test]
    fn signed_mapping_roundtrip_exhaustive() {
        for v in -(1 << 14)..=(1 << 14) {
            assert_eq!(unmap_signed(map_signed(v)), v);
        }
    }

    #[test]
    fn rice_smallest_code() {
        let mut sink = BitSink::new();
        rice_encode(&mut sink, 0, 0);
        let (words, bits) = sink.finish();
        assert_eq!(bits, 1);
        assert_eq!(words[0] >> 31, 0);
    }

    #[test]
    fn rice_hand_expanded_example() {
        // u=9, k=2: q=2 -> "110", remainder 01 -> 11001
        let mut sink = BitSink::new();
        rice_encode(&mut sink, 9, 2);
        let (words, bits) = sink.finish();
        assert_eq!(bits, 5);
        assert_eq!(words[0] >> 27, 0b11001);
        let mut src = BitSource::new(&words);
        assert_eq!(rice_decode(&mut src, 2).unwrap(), 9);
    }

    #[test]
    fn rice_roundtrip_randomized() {
        let mut state = 0x0123456789abcdefu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut sink = BitSink::new();
        let mut inputs = alloc::vec::Vec::new();
        for _ in 0..100_000 {
            let k = (next() % 25) as u32;
            // keep the unary part sane: draw u below 2^(k+10)
            let u = (next() % (1u64 << (k + 10))) as u32;
            rice_encode(&mut sink, u, k);
            inputs.push((u, k));
        }
        let (words, _) = sink.finish();
        let mut src = BitSource::new(&words);
        for &(u, k) in &inputs {
            assert_eq!(rice_decode(&mut src, k).unwrap(), u);
        }
    }

    #[test]
    fn runaway_unary_is_corrupt() {
        let words = alloc::vec![u32::MAX; 2048];
        let mut src = BitSource::new(&words);
        assert_eq!(
            rice_decode(&mut src, 0),
            Err(Error::CorruptStream("runaway unary run"))
        );
    }

    #[test]
    fn context_k_selection_invariant_holds_after_updates() {
        let mut ctx = RiceContext::new();
        let mut state = 0xfeedfacecafebeefu64;
        for _ in 0..10_000 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            ctx.update((state % 5000) as u32);
            let k = ctx.k();
            let n = ctx.count() as u64;
            let a = ctx.accumulated();
            assert!(n << k >= a, "N 2^k >= A violated: n={n} k={k} a={a}");
            if k > 0 {
                assert!(n << (k - 1) < a, "k not minimal: n={n} k={k} a={a}");
            }
            assert!(ctx.count() < RENORM_LIMIT);
        }
    }

    #[test]
    fn context_adapts_upward_on_large_symbols() {
        let mut ctx = RiceContext::new();
        assert_eq!(ctx.k(), 0);
        let mut grew = false;
        for i in 0..64 {
            ctx.update(4000);
            if ctx.k() > 0 {
                grew = true;
                assert!(i < 64, "k must rise within the renorm window");
                break;
            }
        }
        assert!(grew);
    }

    #[test]
    fn zero_block_costs_two_bits() {
        let mut sink = BitSink::new();
        let mut dc = RiceContext::new();
        let mut ac = RiceContext::new();
        encode_block(&mut sink, &[0; 16], &mut dc, &mut ac, 0);
        let (_, bits) = sink.finish();
        assert_eq!(bits, 2);
    }

    #[test]
    fn block_roundtrip_randomized() {
        let mut state = 0x5555aaaa5555aaaau64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut blocks = alloc::vec::Vec::new();
        let mut sink = BitSink::new();
        let mut enc_dc = RiceContext::new();
        let mut enc_ac = RiceContext::new();
        let mut prev = 0i32;
        for _ in 0..10_000 {
            let seq: [i16; 16] = core::array::from_fn(|_| ((next() % 4001) as i32 - 2000) as i16);
            prev = encode_block(&mut sink, &seq, &mut enc_dc, &mut enc_ac, prev);
            blocks.push(seq);
        }
        let (words, bits) = sink.finish();
        // bit accounting: the payload is exactly bits + zero padding
        assert_eq!(words.len(), bits.div_ceil(32) as usize);

        let mut src = BitSource::new(&words);
        let mut dec_dc = RiceContext::new();
        let mut dec_ac = RiceContext::new();
        let mut prev = 0i32;
        for want in &blocks {
            let (got, dc) = decode_block(&mut src, &mut dec_dc, &mut dec_ac, prev).unwrap();
            assert_eq!(&got, want);
            prev = dc;
        }
        assert_eq!(
            src.bits_read(),
            bits,
            "decoder consumes exactly the payload"
        );
        assert_eq!(
            (dec_dc, dec_ac),
            (enc_dc, enc_ac),
            "contexts stay in lockstep"
        );
    }

    proptest! {
        #[test]
        fn zigzag_roundtrip(values in prop::array::uniform16(any::<i16>())) {
            prop_assert_eq!(unzigzag(&zigzag(&values)), values);
        }

        #[test]
        fn single_block_roundtrip(seq in prop::array::uniform16(-8000i16..8000), prev in -4000i32..4000) {
            let mut sink = BitSink::new();
            let mut dc = RiceContext::new();
            let mut ac = RiceContext::new();
            encode_block(&mut sink, &seq, &mut dc, &mut ac, prev);
            let (words, _) = sink.finish();
            let mut src = BitSource::new(&words);
            let mut dc2 = RiceContext::new();
            let mut ac2 = RiceContext::new();
            let (got, _) = decode_block(&mut src, &mut dc2, &mut ac2, prev).unwrap();
            prop_assert_eq!(got, seq);
        }
    }
}
