// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Noisy-CS baseline: all parties share one set of hash functions and one
//! width `s`; the aggregator merges the noisy sketches and takes the median.

use std::collections::BTreeSet;

use rand::Rng;

use super::basic::{noisy_sketch, BasicMessage};
use super::{FrequencyOracle, OneShotConfig, PartyDataset};
use crate::error::{invalid, Error, Result};
use crate::sketch::NoisyCountSketch;

pub fn baseline_width(cfg: &OneShotConfig) -> usize {
    (cfg.s.ceil() as usize).max(1)
}

pub fn noisycs_party_message<R: Rng + ?Sized>(
    party: &PartyDataset,
    cfg: &OneShotConfig,
    shared_seed: u64,
    rng: &mut R,
) -> Result<BasicMessage> {
    let sketch = noisy_sketch(
        party.data(),
        cfg.basic_rows(),
        baseline_width(cfg),
        cfg.domain,
        cfg.eps,
        shared_seed,
        cfg.deterministic,
        rng,
    )?;
    Ok(BasicMessage { party: party.id(), sketch })
}

#[derive(Clone, Debug, Default)]
pub struct NoisyCsAggregator {
    merged: Option<NoisyCountSketch>,
    parties: BTreeSet<u64>,
}

impl NoisyCsAggregator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ingest(&mut self, msg: BasicMessage) -> Result<()> {
        if self.parties.contains(&msg.party) {
            return Err(Error::ProtocolViolation(format!("duplicate message from party {}", msg.party)));
        }
        let merged = match &self.merged {
            None => msg.sketch,
            Some(acc) => acc.merge(&msg.sketch)?,
        };
        self.merged = Some(merged);
        self.parties.insert(msg.party);
        Ok(())
    }

    pub fn merged(&self) -> Option<&NoisyCountSketch> {
        self.merged.as_ref()
    }

    pub fn parties(&self) -> usize {
        self.parties.len()
    }
}

impl FrequencyOracle for NoisyCsAggregator {
    fn estimate(&self, item: u64) -> Result<f64> {
        self.merged.as_ref().ok_or_else(|| invalid("no party messages ingested"))?.estimate(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freq::FrequencyVector;
    use crate::hashing::seeded_rng;

    #[test]
    fn single_party_equals_point_estimate() {
        let cfg = OneShotConfig::new(2.0, 0.01, 4.0, 1, 10, 50).unwrap();
        let d = PartyDataset::new(0, FrequencyVector::from_items([1, 1, 2, 3, 3, 3, 4, 5, 6, 7])).unwrap();
        let m = noisycs_party_message(&d, &cfg, 11, &mut seeded_rng(0)).unwrap();
        let mut agg = NoisyCsAggregator::new();
        agg.ingest(m.clone()).unwrap();
        for j in 0..50 {
            assert_eq!(agg.estimate(j).unwrap(), m.sketch.estimate(j).unwrap());
        }
    }

    #[test]
    fn noiseless_exact_and_seed_mismatch() {
        let cfg = OneShotConfig::new(2.0, 0.01, 4.0, 4, 40, 16).unwrap().with_deterministic(true);
        let mut agg = NoisyCsAggregator::new();
        for p in 0..4u64 {
            let d = PartyDataset::new(p, FrequencyVector::from_counts([(p, 5), (9, 5)])).unwrap();
            agg.ingest(noisycs_party_message(&d, &cfg, 3, &mut seeded_rng(p)).unwrap()).unwrap();
        }
        assert_eq!(agg.estimate(9).unwrap(), 20.0);
        assert_eq!(agg.estimate(2).unwrap(), 5.0);
        let d = PartyDataset::new(9, FrequencyVector::from_counts([(1, 1)])).unwrap();
        let other = noisycs_party_message(&d, &cfg, 4, &mut seeded_rng(0)).unwrap();
        assert!(matches!(agg.ingest(other), Err(Error::IncompatibleSketch(_))));
    }
}
