// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! One item per party: a single-row sketch of width
//! `ceil((e^{eps/2} - 1)^2 / e^{eps/2})` with `Geom(e^{eps/2})` noise.
//! Only nonzero counters are sent, Elias-gamma coded.

use std::collections::BTreeMap;

use rand::Rng;

use super::{FrequencyOracle, PartyDataset};
use crate::bitcode::{gamma_len, unzigzag, zigzag, BitReader, BitWriter};
use crate::dpnoise::GeomParam;
use crate::error::{invalid, Error, Result};
use crate::privacy::PrivacyLedger;
use crate::sketch::{CountSketch, RowHashes};

pub fn ldp_width(eps: f64) -> Result<usize> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid(format!("epsilon must be positive, got {eps}")));
    }
    let a = (eps / 2.0).exp();
    let w = ((a - 1.0).powi(2) / a).ceil();
    Ok(if w >= 1.0 { w as usize } else { 1 })
}

pub fn ldp_noise(eps: f64) -> Result<GeomParam> {
    GeomParam::new(eps, 2.0)
}

/// The single row's hash pair, derived from the party's public seed.
pub fn ldp_row_hashes(hash_seed: u64, width: usize, domain: u64) -> Result<RowHashes> {
    Ok(CountSketch::new(1, width, domain, hash_seed)?.hashes()[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LdpEntry {
    pub col: u64,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseLdpMessage {
    pub party: u64,
    pub width: usize,
    pub hash_seed: u64,
    /// Nonzero counters, strictly increasing columns.
    pub entries: Vec<LdpEntry>,
}

pub fn ldp_party_message<R: Rng + ?Sized>(
    party: &PartyDataset,
    eps: f64,
    domain: u64,
    hash_seed: u64,
    noise_disabled: bool,
    rng: &mut R,
) -> Result<SparseLdpMessage> {
    if party.len() != 1 {
        return Err(Error::WrongProtocol(format!("party {} holds {} items, LDP needs exactly 1", party.id(), party.len())));
    }
    let width = ldp_width(eps)?;
    let noise = ldp_noise(eps)?.with_disabled(noise_disabled);
    let sketch = CountSketch::new(1, width, domain, hash_seed)?.build(party.data())?.add_noise(noise, rng)?;
    let entries = sketch
        .sketch()
        .counters()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(c, &value)| LdpEntry { col: c as u64, value })
        .collect();
    Ok(SparseLdpMessage { party: party.id(), width, hash_seed, entries })
}

pub fn ldp_ledger(eps: f64, noise_disabled: bool) -> Result<PrivacyLedger> {
    let mut l = PrivacyLedger::new();
    l.charge_geom("one-row sketch", ldp_noise(eps)?.with_disabled(noise_disabled), 2.0);
    Ok(l)
}

impl SparseLdpMessage {
    fn validate(&self) -> Result<()> {
        let mut prev: Option<u64> = None;
        for e in &self.entries {
            if e.value == 0 || e.value == i64::MIN {
                return Err(invalid(format!("entry value {} cannot be coded", e.value)));
            }
            if e.col >= self.width as u64 || prev.is_some_and(|p| p >= e.col) {
                return Err(invalid("entry columns must be strictly increasing and below the width"));
            }
            prev = Some(e.col);
        }
        Ok(())
    }

    /// Bit string: per entry `gamma(col+1) gamma(zigzag(value)+1)`, then
    /// `gamma(width+1)`. Returns zero-padded bytes and the exact bit count.
    pub fn encode_bits(&self) -> Result<(Vec<u8>, usize)> {
        self.validate()?;
        let mut w = BitWriter::new();
        for e in &self.entries {
            w.push_gamma(e.col + 1);
            w.push_gamma(zigzag(e.value) + 1);
        }
        w.push_gamma(self.width as u64 + 1);
        Ok(w.finish())
    }

    pub fn bit_len(&self) -> usize {
        let body: usize = self.entries.iter().map(|e| gamma_len(e.col + 1) + gamma_len(zigzag(e.value) + 1)).sum();
        body + gamma_len(self.width as u64 + 1)
    }

    pub fn decode_bits(party: u64, width: usize, hash_seed: u64, bytes: &[u8]) -> Result<Self> {
        let mut r = BitReader::new(bytes);
        let stop = width as u64 + 1;
        let mut entries = Vec::new();
        loop {
            let c = r.read_gamma()?;
            if c == stop {
                break;
            }
            if c > stop {
                return Err(Error::Decode(format!("column code {c} beyond width {width}")));
            }
            let col = c - 1;
            if entries.last().is_some_and(|e: &LdpEntry| e.col >= col) {
                return Err(Error::Decode("columns not strictly increasing".into()));
            }
            let z = r.read_gamma()? - 1;
            if z == 0 {
                return Err(Error::Decode("zero-valued entry".into()));
            }
            entries.push(LdpEntry { col, value: unzigzag(z) });
        }
        r.expect_padding()?;
        Ok(Self { party, width, hash_seed, entries })
    }

    pub fn value_at(&self, col: u64) -> i64 {
        self.entries.iter().find(|e| e.col == col).map_or(0, |e| e.value)
    }
}

/// `sum_i g_i(v) * C_i[h_i(v)]`, absent columns read as zero.
#[derive(Clone, Debug)]
pub struct LdpAggregator {
    width: usize,
    domain: u64,
    parties: BTreeMap<u64, (RowHashes, Vec<LdpEntry>)>,
}

impl LdpAggregator {
    pub fn new(eps: f64, domain: u64) -> Result<Self> {
        if domain == 0 {
            return Err(invalid("domain must be positive"));
        }
        Ok(Self { width: ldp_width(eps)?, domain, parties: BTreeMap::new() })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ingest(&mut self, msg: SparseLdpMessage) -> Result<()> {
        if msg.width != self.width {
            return Err(Error::ProtocolViolation(format!("message width {} differs from {}", msg.width, self.width)));
        }
        if self.parties.contains_key(&msg.party) {
            return Err(Error::ProtocolViolation(format!("duplicate message from party {}", msg.party)));
        }
        let hashes = ldp_row_hashes(msg.hash_seed, self.width, self.domain)?;
        self.parties.insert(msg.party, (hashes, msg.entries));
        Ok(())
    }

    pub fn parties(&self) -> usize {
        self.parties.len()
    }
}

impl FrequencyOracle for LdpAggregator {
    fn estimate(&self, item: u64) -> Result<f64> {
        if item >= self.domain {
            return Err(invalid(format!("item {item} outside domain")));
        }
        let mut sum = 0i64;
        for (h, entries) in self.parties.values() {
            let col = h.bucket.eval(item)?;
            if let Some(e) = entries.iter().find(|e| e.col == col) {
                sum += h.sign.eval(item)? * e.value;
            }
        }
        Ok(sum as f64)
    }
}
