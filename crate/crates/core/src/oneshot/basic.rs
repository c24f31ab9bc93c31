// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! The basic one-shot protocol.
//!
//! Party `i` sketches its data with `R` rows and `ceil(k s n_i / N)` columns
//! under its own hash functions and perturbs every counter with
//! `Geom(e^{eps/(2R)})`. The aggregator sums the per-party medians.

use std::collections::BTreeMap;

use rand::Rng;

use super::{party_width, FrequencyOracle, OneShotConfig, PartyDataset};
use crate::dpnoise::GeomParam;
use crate::error::{invalid, Error, Result};
use crate::freq::FrequencyVector;
use crate::privacy::PrivacyLedger;
use crate::sketch::{CountSketch, NoisyCountSketch};

#[derive(Clone, Debug, PartialEq)]
pub struct BasicMessage {
    pub party: u64,
    pub sketch: NoisyCountSketch,
}

/// Noise for an `rows`-row sketch: one item change moves `2 * rows` counters by 1.
pub fn sketch_noise(eps: f64, rows: usize) -> Result<GeomParam> {
    GeomParam::new(eps, 2.0 * rows as f64)
}

/// Builds and perturbs one sketch. Deterministic mode uses identity hashing
/// with `width >= domain` and no noise.
pub(crate) fn noisy_sketch<R: Rng + ?Sized>(
    data: &FrequencyVector,
    rows: usize,
    width: usize,
    domain: u64,
    eps: f64,
    hash_seed: u64,
    deterministic: bool,
    rng: &mut R,
) -> Result<NoisyCountSketch> {
    let sketch = if deterministic {
        CountSketch::identity(rows, width.max(domain as usize), domain, hash_seed)?
    } else {
        CountSketch::new(rows, width, domain, hash_seed)?
    };
    let noise = sketch_noise(eps, rows)?.with_disabled(deterministic);
    sketch.build(data)?.add_noise(noise, rng)
}

pub fn basic_party_message<R: Rng + ?Sized>(
    party: &PartyDataset,
    cfg: &OneShotConfig,
    hash_seed: u64,
    rng: &mut R,
) -> Result<BasicMessage> {
    let rows = cfg.basic_rows();
    let width = party_width(cfg.k, cfg.s, party.len() as f64, cfg.n_total);
    let sketch = noisy_sketch(party.data(), rows, width, cfg.domain, cfg.eps, hash_seed, cfg.deterministic, rng)?;
    Ok(BasicMessage { party: party.id(), sketch })
}

/// Per-party privacy accounting of a basic message.
pub fn basic_ledger(msg: &BasicMessage) -> PrivacyLedger {
    let mut l = PrivacyLedger::new();
    let rows = msg.sketch.sketch().rows();
    l.charge_geom("sketch", msg.sketch.noise(), 2.0 * rows as f64);
    l
}

/// Sums per-party median estimates.
#[derive(Clone, Debug, Default)]
pub struct BasicAggregator {
    messages: BTreeMap<u64, NoisyCountSketch>,
}

impl BasicAggregator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ingest(&mut self, msg: BasicMessage) -> Result<()> {
        if let Some(first) = self.messages.values().next() {
            if first.sketch().domain() != msg.sketch.sketch().domain() {
                return Err(Error::ProtocolViolation("messages disagree on the domain".into()));
            }
        }
        if self.messages.contains_key(&msg.party) {
            return Err(Error::ProtocolViolation(format!("duplicate message from party {}", msg.party)));
        }
        self.messages.insert(msg.party, msg.sketch);
        Ok(())
    }

    pub fn parties(&self) -> usize {
        self.messages.len()
    }

    pub fn messages(&self) -> impl Iterator<Item = (u64, &NoisyCountSketch)> {
        self.messages.iter().map(|(&p, s)| (p, s))
    }
}

impl FrequencyOracle for BasicAggregator {
    fn estimate(&self, item: u64) -> Result<f64> {
        let first = self.messages.values().next().ok_or_else(|| invalid("no party messages ingested"))?;
        if item >= first.sketch().domain() {
            return Err(invalid(format!("item {item} outside domain")));
        }
        Ok(self.messages.values().map(|s| s.estimate_unchecked(item)).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::seeded_rng;

    fn cfg() -> OneShotConfig {
        OneShotConfig::new(2.0, 0.01, 4.0, 8, 64, 16).unwrap()
    }

    #[test]
    fn message_shape() {
        let c = OneShotConfig::new(2.0, 0.01, 50.0, 100, 1000, 500).unwrap();
        let d = PartyDataset::new(3, FrequencyVector::from_counts([(1, 20)])).unwrap();
        let m = basic_party_message(&d, &c, 9, &mut seeded_rng(0)).unwrap();
        assert_eq!(m.sketch.sketch().width(), 100);
        assert_eq!(m.sketch.sketch().rows(), 15);
        assert!((m.sketch.noise().alpha() - (2.0f64 / 30.0).exp()).abs() < 1e-12);
        assert!((basic_ledger(&m).total() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_single_item() {
        let c = cfg().with_deterministic(true);
        let d = PartyDataset::new(0, FrequencyVector::from_counts([(5, 7)])).unwrap();
        let m = basic_party_message(&d, &c, 1, &mut seeded_rng(0)).unwrap();
        assert_eq!(m.sketch.estimate(5).unwrap(), 7.0);
        assert_eq!(m.sketch.estimate(4).unwrap(), 0.0);
    }

    #[test]
    fn aggregation_rules() {
        let c = cfg().with_deterministic(true);
        let mut agg = BasicAggregator::new();
        assert!(agg.estimate(0).is_err());
        for p in 0..8u64 {
            let d = PartyDataset::new(p, FrequencyVector::from_counts([(p, 8), (15, p)])).unwrap();
            agg.ingest(basic_party_message(&d, &c, p, &mut seeded_rng(p)).unwrap()).unwrap();
        }
        assert_eq!(agg.estimate(15).unwrap(), 28.0);
        assert_eq!(agg.estimate(3).unwrap(), 8.0);
        assert!(agg.estimate(16).is_err());
        let d = PartyDataset::new(2, FrequencyVector::from_counts([(1, 1)])).unwrap();
        let dup = basic_party_message(&d, &c, 0, &mut seeded_rng(0)).unwrap();
        assert!(matches!(agg.ingest(dup), Err(Error::ProtocolViolation(_))));
    }
}
