// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::VecDeque;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use super::inter::{block_seed, empty_block_sketch};
use super::{DyadicBlock, StreamMode, StreamMessage, StreamPayload, StreamSetup};
use crate::error::{invalid, Error, Result};
use crate::sketch::{CountSketch, NoisyCountSketch};

#[derive(Clone, Debug)]
struct ActiveBlock {
    block: DyadicBlock,
    sketch: CountSketch,
}

/// One party's streaming state, advanced one step at a time.
#[derive(Clone, Debug)]
pub struct PartyStream {
    id: u64,
    setup: Arc<StreamSetup>,
    t: u64,
    rng: ChaCha8Rng,
    intra_on: bool,
    active: Vec<Option<ActiveBlock>>,
    /// Full mode: the latest complete block per level.
    last_complete: Vec<Option<(DyadicBlock, NoisyCountSketch)>>,
    /// Sliding mode: blocks of the two most recent tumbling windows.
    window_blocks: VecDeque<(DyadicBlock, NoisyCountSketch)>,
    emitted: u64,
}

impl PartyStream {
    pub fn new(id: u64, setup: Arc<StreamSetup>, rng: ChaCha8Rng) -> Self {
        let levels = setup.levels.len();
        let intra_on = setup.intra.is_some();
        Self {
            id,
            setup,
            t: 0,
            rng,
            intra_on,
            active: vec![None; levels],
            last_complete: vec![None; levels],
            window_blocks: VecDeque::new(),
            emitted: 0,
        }
    }

    /// Drops the intra-epoch part (single-stream use).
    pub(crate) fn without_intra(mut self) -> Self {
        self.intra_on = false;
        self
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn setup(&self) -> &StreamSetup {
        &self.setup
    }

    /// Blocks sent so far.
    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Feeds the item of step `t + 1`.
    pub fn step(&mut self, item: u64) -> Result<Vec<StreamMessage>> {
        if item >= self.setup.cfg.domain && item != self.setup.dummy_item() {
            return Err(invalid(format!("item {item} outside domain")));
        }
        let horizon = self.setup.sched.b * self.setup.sched.m;
        if self.t >= horizon {
            return Err(Error::ProtocolViolation(format!("stream of party {} already ended", self.id)));
        }
        self.t += 1;
        let t = self.t;
        let sched = self.setup.sched;
        let mut out = Vec::new();
        if self.intra_on {
            let codec = self.setup.intra.expect("intra codec present");
            for sample in codec.encode(self.id, item, t, &mut self.rng)? {
                out.push(StreamMessage { party: self.id, t, payload: StreamPayload::Intra(sample) });
            }
        }
        let epoch = sched.epoch_of(t);
        let f = self.setup.frame_size;
        let frame = (epoch - 1) / f;
        let rel = (epoch - 1) % f + 1;
        while self.window_blocks.front().is_some_and(|(b, _)| b.frame + 1 < frame) {
            self.window_blocks.pop_front();
        }
        for level in 0..self.setup.levels.len() {
            let len = 1u64 << level;
            let index = (rel - 1) / len + 1;
            if index * len > f {
                continue;
            }
            let block = DyadicBlock { frame, level: level as u32, index };
            let slot = &mut self.active[level];
            if slot.as_ref().map_or(true, |a| a.block != block) {
                let params = &self.setup.levels[level];
                let seed = block_seed(self.setup.cfg.master_seed, self.id, &block);
                let sketch = empty_block_sketch(params, self.setup.sketch_domain, seed, self.setup.cfg.deterministic)?;
                *slot = Some(ActiveBlock { block, sketch });
            }
            slot.as_mut().expect("active block").sketch.update(item, 1)?;
        }
        if t % sched.b == 0 {
            self.close_blocks(frame, rel, t, &mut out)?;
        }
        Ok(out)
    }

    fn close_blocks(&mut self, frame: u64, rel: u64, t: u64, out: &mut Vec<StreamMessage>) -> Result<()> {
        for level in 0..self.active.len() {
            let done = matches!(&self.active[level], Some(a) if a.block.frame == frame && a.block.index << level == rel);
            if !done {
                continue;
            }
            let ActiveBlock { block, sketch } = self.active[level].take().expect("active block");
            let noise = self.setup.levels[level].noise.with_disabled(self.setup.cfg.deterministic);
            let noisy = sketch.add_noise(noise, &mut self.rng)?;
            out.push(StreamMessage { party: self.id, t, payload: StreamPayload::Block { block, sketch: noisy.clone() } });
            self.emitted += 1;
            match self.setup.cfg.mode {
                StreamMode::Full => self.last_complete[level] = Some((block, noisy)),
                StreamMode::Sliding { .. } => self.window_blocks.push_back((block, noisy)),
            }
        }
        Ok(())
    }

    /// Pads the last epoch with dummy items so every block completes.
    pub fn finish(&mut self) -> Result<Vec<StreamMessage>> {
        let horizon = self.setup.sched.b * self.setup.sched.m;
        let mut out = Vec::new();
        while self.t < horizon {
            out.extend(self.step(self.setup.dummy_item())?);
        }
        Ok(out)
    }

    /// Latest complete block per level (full mode).
    pub fn last_complete(&self) -> impl Iterator<Item = &(DyadicBlock, NoisyCountSketch)> {
        self.last_complete.iter().flatten()
    }

    pub fn window_blocks(&self) -> impl Iterator<Item = &(DyadicBlock, NoisyCountSketch)> {
        self.window_blocks.iter()
    }

    /// Sketches held: active plus retained.
    pub fn resident_sketches(&self) -> usize {
        self.active.iter().flatten().count() + self.last_complete.iter().flatten().count() + self.window_blocks.len()
    }

    pub fn resident_counters(&self) -> usize {
        self.active.iter().flatten().map(|a| a.sketch.counter_count()).sum::<usize>()
            + self.last_complete.iter().flatten().map(|(_, s)| s.sketch().counter_count()).sum::<usize>()
            + self.window_blocks.iter().map(|(_, s)| s.sketch().counter_count()).sum::<usize>()
    }
}
