// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! In-process driver: `k` parties and one aggregator in lockstep.

use std::sync::Arc;

use super::{PartyStream, StreamAggregator, StreamConfig, StreamMessage, StreamSetup};
use crate::error::{invalid, Result};
use crate::hashing::{derive_seed, seeded_rng, Purpose};

#[derive(Debug)]
pub struct StreamRun {
    setup: Arc<StreamSetup>,
    parties: Vec<PartyStream>,
    agg: StreamAggregator,
}

impl StreamRun {
    /// Party noise and sampling streams are derived from `seed`.
    pub fn new(cfg: StreamConfig, seed: u64) -> Result<Self> {
        let setup = Arc::new(StreamSetup::new(cfg)?);
        let parties = (0..cfg.k)
            .map(|i| PartyStream::new(i, setup.clone(), seeded_rng(derive_seed(seed, i, Purpose::Noise, 0))))
            .collect();
        Ok(Self { agg: StreamAggregator::new(setup.clone()), setup, parties })
    }

    pub fn setup(&self) -> &StreamSetup {
        &self.setup
    }

    pub fn aggregator(&self) -> &StreamAggregator {
        &self.agg
    }

    pub fn parties(&self) -> &[PartyStream] {
        &self.parties
    }

    pub fn time(&self) -> u64 {
        self.agg.time()
    }

    /// Advances one step; `items[i]` goes to party `i`.
    pub fn step(&mut self, items: &[u64]) -> Result<()> {
        self.step_with(items, |_| {})
    }

    pub fn step_with<F: FnMut(&StreamMessage)>(&mut self, items: &[u64], mut on_message: F) -> Result<()> {
        if items.len() != self.parties.len() {
            return Err(invalid(format!("{} items for {} parties", items.len(), self.parties.len())));
        }
        let t = self.agg.time() + 1;
        for (party, &item) in self.parties.iter_mut().zip(items) {
            for msg in party.step(item)? {
                on_message(&msg);
                self.agg.ingest(msg)?;
            }
        }
        self.agg.end_step(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streaming::StreamMode;

    #[test]
    fn lockstep_rejects_wrong_width() {
        let cfg = StreamConfig::new(16, 4, 3, 2.0, 0.01, 8, StreamMode::Full);
        let mut run = StreamRun::new(cfg, 1).unwrap();
        assert!(run.step(&[1, 2]).is_err());
        let mut msgs = 0;
        for _ in 0..16 {
            run.step_with(&[1, 2, 3], |_| msgs += 1).unwrap();
        }
        assert!(msgs >= 3 * 7);
        assert_eq!(run.time(), 16);
        assert!(run.aggregator().full_stream_estimate(1).is_ok());
    }
}
