//! Bit-level packing into 32-bit words, MSB-first.
//!
//! The writer concatenates variable-length codes into aligned 32-bit words
//! so the hot loop touches memory one word at a time; flushing pads the last
//! word with zero bits. The reader mirrors the layout and reports reads past
//! the end as stream corruption.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Accumulates bits MSB-first into 32-bit words.
#[derive(Debug, Default)]
pub struct BitSink {
    words: Vec<u32>,
    cur: u32,
    used: u32,
    bits_written: u64,
}

impl BitSink {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn write_bit(&mut self, bit: u32) {
        debug_assert!(bit <= 1);
        self.cur = (self.cur << 1) | bit;
        self.used += 1;
        self.bits_written += 1;
        if self.used == 32 {
            self.words.push(self.cur);
            self.cur = 0;
            self.used = 0;
        }
    }

    /// Writes the `count` low-order bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u32, count: u32) {
        debug_assert!(count <= 32);
        for i in (0..count).rev() {
            self.write_bit((value >> i) & 1);
        }
    }

    /// Writes `count` one-bits followed by a terminating zero.
    pub fn write_unary(&mut self, count: u32) {
        for _ in 0..count {
            self.write_bit(1);
        }
        self.write_bit(0);
    }

    /// Total payload bits written so far (pad bits excluded).
    pub fn bits_written(&self) -> u64 {
        self.bits_written
    }

    /// Pads the final partial word with zeros and returns the word buffer
    /// together with the exact payload bit count.
    pub fn finish(mut self) -> (Vec<u32>, u64) {
        if self.used > 0 {
            self.words.push(self.cur << (32 - self.used));
        }
        (self.words, self.bits_written)
    }
}

/// Reads bits MSB-first from 32-bit words.
pub struct BitSource<'a> {
    words: &'a [u32],
    /// Next bit index into the whole stream.
    pos: u64,
}

impl<'a> BitSource<'a> {
    pub fn new(words: &'a [u32]) -> Self {
        Self { words, pos: 0 }
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<u32> {
        let word = (self.pos / 32) as usize;
        if word >= self.words.len() {
            return Err(Error::CorruptStream("read past end of payload"));
        }
        let off = 31 - (self.pos % 32) as u32;
        self.pos += 1;
        Ok((self.words[word] >> off) & 1)
    }

    pub fn read_bits(&mut self, count: u32) -> Result<u32> {
        debug_assert!(count <= 32);
        let mut v = 0u32;
        for _ in 0..count {
            v = (v << 1) | self.read_bit()?;
        }
        Ok(v)
    }

    /// Bits consumed so far.
    pub fn bits_read(&self) -> u64 {
        self.pos
    }
}
