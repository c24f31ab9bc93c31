// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use super::dyadic::cover_epochs;
use super::{DyadicBlock, IntraSample, StreamMessage, StreamMode, StreamPayload, StreamSetup};
use crate::error::{invalid, Error, Result};
use crate::sketch::NoisyCountSketch;

/// Aggregator state. Steps follow a synchronous contract: all messages of
/// step `t` are ingested, then [`StreamAggregator::end_step`] is called,
/// then queries about the current step may be asked.
#[derive(Clone, Debug)]
pub struct StreamAggregator {
    setup: Arc<StreamSetup>,
    t: u64,
    blocks: HashMap<DyadicBlock, Vec<NoisyCountSketch>>,
    received: HashSet<(u64, DyadicBlock)>,
    intra: BTreeMap<u64, Vec<IntraSample>>,
}

impl StreamAggregator {
    pub fn new(setup: Arc<StreamSetup>) -> Self {
        Self { setup, t: 0, blocks: HashMap::new(), received: HashSet::new(), intra: BTreeMap::new() }
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn setup(&self) -> &StreamSetup {
        &self.setup
    }

    pub fn ingest(&mut self, msg: StreamMessage) -> Result<()> {
        if msg.party >= self.setup.cfg.k {
            return Err(Error::ProtocolViolation(format!("unknown party {}", msg.party)));
        }
        match msg.payload {
            StreamPayload::Intra(sample) => {
                let epoch = self.setup.sched.epoch_of(sample.t);
                self.intra.entry(epoch).or_default().push(sample);
            }
            StreamPayload::Block { block, sketch } => {
                if !self.received.insert((msg.party, block)) {
                    return Err(Error::ProtocolViolation(format!("party {} sent block {block:?} twice", msg.party)));
                }
                if self.setup.cfg.mode == StreamMode::Full {
                    self.blocks.retain(|b, _| b.level != block.level || b.index >= block.index);
                }
                self.blocks.entry(block).or_default().push(sketch);
            }
        }
        Ok(())
    }

    /// Closes step `t` and drops state no future query can use.
    pub fn end_step(&mut self, t: u64) -> Result<()> {
        if t != self.t + 1 {
            return Err(Error::ProtocolViolation(format!("step {t} follows step {}", self.t)));
        }
        self.t = t;
        let sched = self.setup.sched;
        let keep_from = match self.setup.window {
            None => sched.complete_epochs(t) + 1,
            Some(w) => t.saturating_sub(w) / sched.b + 1,
        };
        self.intra.retain(|&e, _| e >= keep_from);
        if self.setup.window.is_some() {
            let frame = (sched.epoch_of(t) - 1) / self.setup.frame_size;
            self.blocks.retain(|b, _| b.frame + 1 >= frame);
        }
        Ok(())
    }

    pub fn retained_blocks(&self) -> impl Iterator<Item = &DyadicBlock> {
        self.blocks.keys()
    }

    fn block_estimate(&self, block: &DyadicBlock, item: u64) -> Result<f64> {
        let sketches = self
            .blocks
            .get(block)
            .ok_or_else(|| Error::ProtocolViolation(format!("block {block:?} was never received")))?;
        Ok(sketches.iter().map(|s| s.estimate_unchecked(item)).sum())
    }

    /// Intra estimate from samples of `epoch` with step in `(lo, hi]`.
    fn intra_part(&self, epoch: u64, lo: u64, hi: u64, item: u64) -> f64 {
        match (&self.setup.intra, self.intra.get(&epoch)) {
            (Some(codec), Some(samples)) => codec.estimate(samples.iter().filter(|s| s.t > lo && s.t <= hi), item),
            _ => 0.0,
        }
    }

    fn check_item(&self, item: u64) -> Result<()> {
        if item >= self.setup.cfg.domain {
            return Err(invalid(format!("item {item} outside domain")));
        }
        if self.t == 0 {
            return Err(invalid("no step has been completed"));
        }
        Ok(())
    }

    /// Blocks and intra ranges used for the window `(lo, t]` of steps.
    fn range_estimate(&self, lo: u64, item: u64) -> Result<f64> {
        let (t, b) = (self.t, self.setup.sched.b);
        let q = self.setup.sched.complete_epochs(t);
        let mut est = 0.0;
        let mut first_full = lo.div_ceil(b);
        if lo % b != 0 {
            est += self.intra_part(first_full, lo, first_full * b, item);
        }
        first_full = first_full.min(q);
        for block in cover_epochs(first_full, q, self.setup.frame_size) {
            est += self.block_estimate(&block, item)?;
        }
        if t > q * b {
            est += self.intra_part(q + 1, q * b, t, item);
        }
        Ok(est)
    }

    /// Estimate of `f(item; 1, t)` at the current step.
    pub fn full_stream_estimate(&self, item: u64) -> Result<f64> {
        if self.setup.window.is_some() {
            return Err(Error::WrongProtocol("full-stream query on a sliding-window aggregator".into()));
        }
        self.check_item(item)?;
        self.range_estimate(0, item)
    }

    /// Estimate of `f(item; t - w + 1, t)` at the current step.
    pub fn sliding_window_estimate(&self, item: u64) -> Result<f64> {
        let w = self.setup.window.ok_or_else(|| Error::WrongProtocol("window query on a full-stream aggregator".into()))?;
        self.check_item(item)?;
        self.range_estimate(self.t.saturating_sub(w), item)
    }

    /// Whichever query matches the configured mode.
    pub fn estimate(&self, item: u64) -> Result<f64> {
        match self.setup.window {
            None => self.full_stream_estimate(item),
            Some(_) => self.sliding_window_estimate(item),
        }
    }

    /// The three parts of the current window: tail epoch, blocks, active epoch.
    pub fn window_parts(&self) -> Result<(Option<u64>, Vec<DyadicBlock>, Option<u64>)> {
        let w = self.setup.window.ok_or_else(|| Error::WrongProtocol("not a sliding-window aggregator".into()))?;
        let (t, b) = (self.t, self.setup.sched.b);
        let lo = t.saturating_sub(w);
        let q = self.setup.sched.complete_epochs(t);
        let tail = (lo % b != 0).then(|| lo.div_ceil(b));
        let blocks = cover_epochs(lo.div_ceil(b).min(q), q, self.setup.frame_size);
        let active = (t > q * b).then_some(q + 1);
        Ok((tail, blocks, active))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::seeded_rng;
    use crate::streaming::{PartyStream, StreamConfig};

    fn drive(cfg: StreamConfig, steps: u64) -> StreamAggregator {
        let setup = Arc::new(StreamSetup::new(cfg).unwrap());
        let mut agg = StreamAggregator::new(setup.clone());
        let mut parties: Vec<PartyStream> = (0..cfg.k).map(|i| PartyStream::new(i, setup.clone(), seeded_rng(i))).collect();
        for t in 1..=steps {
            for p in &mut parties {
                for m in p.step((t + p.id()) % cfg.domain).unwrap() {
                    agg.ingest(m).unwrap();
                }
            }
            agg.end_step(t).unwrap();
        }
        agg
    }

    fn parts_at(w: u64, t: u64) -> (Option<u64>, Vec<u64>, Option<u64>) {
        let cfg = StreamConfig::new(64, 16, 1, 2.0, 0.01, 8, StreamMode::Sliding { w }).with_deterministic(true);
        let agg = drive(cfg, t);
        let (tail, blocks, active) = agg.window_parts().unwrap();
        let f = agg.setup().frame_size;
        (tail, blocks.iter().flat_map(|b| b.first_epoch(f)..=b.last_epoch(f)).collect(), active)
    }

    #[test]
    fn window_parts_inside_epoch_five() {
        // b = 4; t = 18 lies in epoch 5
        assert_eq!(parts_at(16, 18), (Some(1), vec![2, 3, 4], Some(5)));
        assert_eq!(parts_at(12, 18), (Some(2), vec![3, 4], Some(5)));
        assert_eq!(parts_at(16, 20), (None, vec![2, 3, 4, 5], None));
    }

    #[test]
    fn mode_mismatch_and_duplicates() {
        let cfg = StreamConfig::new(16, 4, 2, 2.0, 0.01, 8, StreamMode::Full);
        let mut agg = drive(cfg, 8);
        assert!(matches!(agg.sliding_window_estimate(1), Err(Error::WrongProtocol(_))));
        assert!(agg.full_stream_estimate(8).is_err());
        let setup = Arc::new(StreamSetup::new(cfg).unwrap());
        let mut p = PartyStream::new(0, setup, seeded_rng(0));
        let mut msgs = Vec::new();
        for _ in 0..4 {
            msgs.extend(p.step(1).unwrap());
        }
        let block = msgs.into_iter().find(|m| matches!(m.payload, StreamPayload::Block { .. })).unwrap();
        assert!(matches!(agg.ingest(block), Err(Error::ProtocolViolation(_))));
        assert!(agg.end_step(10).is_err());
    }
}
