// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Binary sketch serialization.
//!
//! Every field is a little-endian 64-bit word:
//!
//! ```text
//! word 0   magic "FMCS", version, kind (0 clean / 1 noisy), hash source, flags
//! word 1   rows R
//! word 2   width
//! word 3   domain u
//! word 4   hash seed (0 for explicit hashes)
//! word 5   noise epsilon (f64 bits, 0 for clean sketches)
//! word 6   noise sensitivity (f64 bits)
//! [explicit hashes only: 6 words per row: bucket a, b, p; sign a, b, p]
//! R * width counters, row-major, i64
//! ```

use super::{CountSketch, HashSource, NoisyCountSketch, RowHashes};
use crate::dpnoise::GeomParam;
use crate::error::{Error, Result};
use crate::hashing::{PairwiseHash, SignHash};

pub const SKETCH_MAGIC: [u8; 4] = *b"FMCS";
pub const SKETCH_HEADER_WORDS: usize = 7;
const VERSION: u8 = 1;
const KIND_CLEAN: u8 = 0;
const KIND_NOISY: u8 = 1;
const FLAG_NOISE_DISABLED: u8 = 1;

fn decode_err(msg: impl Into<String>) -> Error {
    Error::Decode(msg.into())
}

impl CountSketch {
    /// Header plus counter words.
    pub fn encoded_words(&self) -> usize {
        let explicit = if self.source == HashSource::Explicit { 6 * self.rows.len() } else { 0 };
        SKETCH_HEADER_WORDS + explicit + self.counters.len()
    }

    pub fn header_words(&self) -> usize {
        self.encoded_words() - self.counters.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        encode(self, None)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (sketch, noise) = decode(bytes)?;
        if noise.is_some() {
            return Err(decode_err("expected a clean sketch, found a noisy one"));
        }
        Ok(sketch)
    }
}

impl NoisyCountSketch {
    pub fn encoded_words(&self) -> usize {
        self.sketch.encoded_words()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        encode(&self.sketch, Some(self.noise))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (sketch, noise) = decode(bytes)?;
        let noise = noise.ok_or_else(|| decode_err("expected a noisy sketch, found a clean one"))?;
        Ok(NoisyCountSketch { sketch, noise })
    }
}

fn encode(sk: &CountSketch, noise: Option<GeomParam>) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 * sk.encoded_words());
    let (mode, seed) = match sk.source {
        HashSource::Seeded(s) => (0u8, s),
        HashSource::Identity(s) => (1u8, s),
        HashSource::Explicit => (2u8, 0),
    };
    let kind = if noise.is_some() { KIND_NOISY } else { KIND_CLEAN };
    let flags = match noise {
        Some(n) if n.is_disabled() => FLAG_NOISE_DISABLED,
        _ => 0,
    };
    out.extend_from_slice(&SKETCH_MAGIC);
    out.extend_from_slice(&[VERSION, kind, mode, flags]);
    for w in [sk.rows.len() as u64, sk.width as u64, sk.domain, seed] {
        out.extend_from_slice(&w.to_le_bytes());
    }
    let (eps, sens) = noise.map(|n| (n.epsilon(), n.sensitivity())).unwrap_or((0.0, 0.0));
    out.extend_from_slice(&eps.to_bits().to_le_bytes());
    out.extend_from_slice(&sens.to_bits().to_le_bytes());
    if sk.source == HashSource::Explicit {
        for row in &sk.rows {
            let s = row.sign.inner();
            for w in [row.bucket.a(), row.bucket.b(), row.bucket.modulus(), s.a(), s.b(), s.modulus()] {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
    }
    for c in &sk.counters {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

struct Words<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Words<'_> {
    fn next(&mut self) -> Result<u64> {
        let chunk = self
            .bytes
            .get(self.pos..self.pos + 8)
            .ok_or_else(|| decode_err("sketch payload truncated"))?;
        self.pos += 8;
        Ok(u64::from_le_bytes(chunk.try_into().expect("8-byte chunk")))
    }
}

fn decode(bytes: &[u8]) -> Result<(CountSketch, Option<GeomParam>)> {
    if bytes.len() % 8 != 0 {
        return Err(decode_err("sketch payload is not a whole number of words"));
    }
    let mut words = Words { bytes, pos: 0 };
    let tag = words.next()?.to_le_bytes();
    if tag[..4] != SKETCH_MAGIC {
        return Err(decode_err("bad sketch magic"));
    }
    let [_, _, _, _, version, kind, mode, flags] = tag;
    if version != VERSION {
        return Err(decode_err(format!("unsupported sketch version {version}")));
    }
    let rows = usize::try_from(words.next()?).map_err(|_| decode_err("row count too large"))?;
    let width = usize::try_from(words.next()?).map_err(|_| decode_err("width too large"))?;
    let domain = words.next()?;
    let seed = words.next()?;
    let eps = f64::from_bits(words.next()?);
    let sens = f64::from_bits(words.next()?);
    let cells = rows.checked_mul(width).ok_or_else(|| decode_err("sketch shape overflows"))?;
    let explicit_words = if mode == 2 { 6 * rows } else { 0 };
    if bytes.len() / 8 != SKETCH_HEADER_WORDS + explicit_words + cells {
        return Err(decode_err("sketch payload length does not match its header"));
    }
    let mut sketch = match mode {
        0 => CountSketch::new(rows, width, domain, seed),
        1 => CountSketch::identity(rows, width, domain, seed),
        2 => {
            let mut hashes = Vec::with_capacity(rows);
            for _ in 0..rows {
                let (a, b, p) = (words.next()?, words.next()?, words.next()?);
                let bucket = PairwiseHash::from_parts(a, b, p, width as u64, domain)?;
                let (a, b, p) = (words.next()?, words.next()?, words.next()?);
                let sign = SignHash::from_inner(PairwiseHash::from_parts(a, b, p, 2, domain)?)?;
                hashes.push(RowHashes { bucket, sign });
            }
            CountSketch::with_hashes(hashes, width)
        }
        other => return Err(decode_err(format!("unknown hash source {other}"))),
    }
    .map_err(|e| decode_err(e.to_string()))?;
    for c in sketch.counters_mut() {
        *c = words.next()? as i64;
    }
    let noise = match kind {
        KIND_CLEAN => None,
        KIND_NOISY if flags & FLAG_NOISE_DISABLED != 0 => Some(GeomParam::disabled()),
        KIND_NOISY => Some(GeomParam::new(eps, sens).map_err(|e| decode_err(e.to_string()))?),
        other => return Err(decode_err(format!("unknown sketch kind {other}"))),
    };
    Ok((sketch, noise))
}
