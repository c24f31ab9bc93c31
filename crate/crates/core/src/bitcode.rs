// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! MSB-first bit strings with Elias-gamma and zigzag integer codes.

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Low `n` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, n: u32) {
        for i in (0..n).rev() {
            self.push_bit((value >> i) & 1 == 1);
        }
    }

    /// Elias-gamma code of `n >= 1`: `floor(log2 n)` zeros, then `n` in binary.
    pub fn push_gamma(&mut self, n: u64) {
        assert!(n >= 1, "Elias-gamma codes positive integers only");
        let width = 64 - n.leading_zeros();
        self.push_bits(0, width - 1);
        self.push_bits(n, width);
    }

    /// Exact number of bits written.
    pub fn bit_len(&self) -> usize {
        self.len
    }

    /// Zero-padded bytes and the unpadded bit length.
    pub fn finish(self) -> (Vec<u8>, usize) {
        (self.bytes, self.len)
    }
}

pub fn gamma_len(n: u64) -> usize {
    assert!(n >= 1);
    2 * (64 - n.leading_zeros() as usize) - 1
}

pub fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

pub fn unzigzag(z: u64) -> i64 {
    ((z >> 1) as i64) ^ -((z & 1) as i64)
}

#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let byte = self.bytes.get(self.pos / 8).ok_or_else(|| Error::Decode("bit string ended early".into()))?;
        let bit = byte & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_gamma(&mut self) -> Result<u64> {
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(Error::Decode("Elias-gamma prefix longer than 63 bits".into()));
            }
        }
        let mut n = 1u64;
        for _ in 0..zeros {
            n = (n << 1) | u64::from(self.read_bit()?);
        }
        Ok(n)
    }

    /// Checks that everything after the cursor is zero padding within the last byte.
    pub fn expect_padding(&mut self) -> Result<()> {
        if self.bytes.len() != self.pos.div_ceil(8) {
            return Err(Error::Decode("trailing bytes after terminator".into()));
        }
        while self.pos % 8 != 0 {
            if self.read_bit()? {
                return Err(Error::Decode("nonzero padding bit".into()));
            }
        }
        Ok(())
    }
}
