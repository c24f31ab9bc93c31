// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Communication accounting in 64-bit words and in bits.

use std::ops::AddAssign;

use crate::oneshot::freqsep::FreqSepMessage;
use crate::oneshot::ldp::SparseLdpMessage;
use crate::sketch::NoisyCountSketch;
use crate::streaming::{StreamMessage, StreamPayload};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Comm {
    pub words: u64,
    pub bits: u64,
}

impl AddAssign for Comm {
    fn add_assign(&mut self, o: Comm) {
        self.words += o.words;
        self.bits += o.bits;
    }
}

impl std::iter::Sum for Comm {
    fn sum<I: Iterator<Item = Comm>>(iter: I) -> Comm {
        let mut c = Comm::default();
        for x in iter {
            c += x;
        }
        c
    }
}

/// How hash functions reach the aggregator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CommModel {
    /// Without public randomness every hash seed is sent: one word and
    /// `ceil(log2 u)` bits per hash.
    pub public_randomness: bool,
    pub domain: u64,
}

impl CommModel {
    pub fn new(public_randomness: bool, domain: u64) -> Self {
        Self { public_randomness, domain }
    }

    fn seed_cost(&self, hashes: u64) -> Comm {
        if self.public_randomness {
            return Comm::default();
        }
        let bits_per = u64::from(64 - self.domain.max(2).saturating_sub(1).leading_zeros());
        Comm { words: hashes, bits: hashes * bits_per }
    }

    /// Serialized sketch: header plus counters, 64 bits per word.
    pub fn sketch(&self, s: &NoisyCountSketch) -> Comm {
        let words = s.encoded_words() as u64;
        let mut c = Comm { words, bits: 64 * words };
        c += self.seed_cost(2 * s.sketch().rows() as u64);
        c
    }

    /// Two words per nonzero entry; the exact Elias bit length.
    pub fn ldp(&self, m: &SparseLdpMessage) -> Comm {
        let mut c = Comm { words: 2 * m.entries.len() as u64, bits: m.bit_len() as u64 };
        c += self.seed_cost(2);
        c
    }

    /// Heavy samples (two words each, one per repetition header) and the light sketch.
    pub fn freqsep(&self, m: &FreqSepMessage) -> Comm {
        let words = 2 * m.heavy.len() as u64 + m.reps as u64;
        let mut c = Comm { words, bits: 64 * words };
        c += self.sketch(&m.light.sketch);
        c
    }

    /// HRR sample: one word, or `log2(dim) + 1` bits.
    pub fn stream(&self, m: &StreamMessage, hrr_dim: u64) -> Comm {
        match &m.payload {
            StreamPayload::Intra(_) => Comm { words: 1, bits: u64::from(hrr_dim.trailing_zeros()) + 1 },
            StreamPayload::Block { sketch, .. } => self.sketch(sketch),
        }
    }
}
