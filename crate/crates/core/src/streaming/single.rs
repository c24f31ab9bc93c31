// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! One party, one stream: the inter-epoch structure alone. Queries between
//! epoch boundaries return the estimate at the last boundary.

use std::sync::Arc;

use super::{dyadic_decompose, PartyStream, StreamConfig, StreamMode, StreamSetup};
use crate::error::{invalid, Error, Result};
use crate::hashing::seeded_rng;

#[derive(Clone, Debug)]
pub struct SingleStream {
    party: PartyStream,
}

impl SingleStream {
    pub fn new(cfg: StreamConfig, noise_seed: u64) -> Result<Self> {
        if cfg.k != 1 || cfg.mode != StreamMode::Full {
            return Err(invalid("single-stream mode needs k = 1 and the full-stream structure"));
        }
        let setup = Arc::new(StreamSetup::new(cfg)?);
        Ok(Self { party: PartyStream::new(0, setup, seeded_rng(noise_seed)).without_intra() })
    }

    pub fn push(&mut self, item: u64) -> Result<()> {
        self.party.step(item).map(|_| ())
    }

    pub fn time(&self) -> u64 {
        self.party.time()
    }

    /// Prefix count up to the last completed epoch.
    pub fn estimate(&self, item: u64) -> Result<f64> {
        let setup = self.party.setup();
        if item >= setup.cfg.domain {
            return Err(invalid(format!("item {item} outside domain")));
        }
        let q = setup.sched.complete_epochs(self.time());
        let mut est = 0.0;
        for block in dyadic_decompose(q, setup.sched.m)? {
            let (_, sketch) = self
                .party
                .last_complete()
                .find(|(b, _)| *b == block)
                .ok_or_else(|| Error::ProtocolViolation(format!("block {block:?} not retained")))?;
            est += sketch.estimate(item)?;
        }
        Ok(est)
    }

    pub fn resident_counters(&self) -> usize {
        self.party.resident_counters()
    }

    pub fn setup(&self) -> &StreamSetup {
        self.party.setup()
    }
}

pub fn single_stream_mode(n: u64, s: u64, eps: f64, beta: f64, domain: u64, seed: u64) -> Result<SingleStream> {
    let cfg = StreamConfig::new(n, s, 1, eps, beta, domain, StreamMode::Full).with_master_seed(seed);
    SingleStream::new(cfg, seed ^ 0x5EED)
}
