// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Streaming protocol.
//!
//! Every party receives one item per step. Steps are grouped into epochs of
//! `b` steps. Inside the active epoch, parties send sampled HRR bits; each
//! completed dyadic block of epochs is sent once as a noisy count sketch.
//! Prefix counts are answered from the dyadic decomposition of the completed
//! epochs plus the intra-epoch samples of the active one. Sliding windows
//! host the dyadic structure in tumbling windows of `w` steps.

pub mod aggregator;
pub mod dyadic;
pub mod inter;
pub mod intra;
pub mod party;
mod schedule;
pub mod sim;
pub mod single;

pub use aggregator::StreamAggregator;
pub use dyadic::{dyadic_decompose, DyadicBlock};
pub use inter::{inter_block_params, inter_party_block, InterParams};
pub use intra::{intra_estimate, intra_party_step, IntraCodec, IntraSample};
pub use party::PartyStream;
pub use schedule::{epoch_schedule, EpochSchedule};
pub use single::{single_stream_mode, SingleStream};

use crate::error::{invalid, Result};
use crate::privacy::PrivacyLedger;
use crate::sketch::NoisyCountSketch;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamMode {
    Full,
    /// Window of `w` steps; `w` is rounded up to a multiple of `b`.
    Sliding { w: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreamConfig {
    pub n: u64,
    pub s: u64,
    pub k: u64,
    pub eps: f64,
    pub beta: f64,
    pub domain: u64,
    pub mode: StreamMode,
    pub rows: Option<usize>,
    pub deterministic: bool,
    /// Public randomness for the block hash functions.
    pub master_seed: u64,
}

impl StreamConfig {
    pub fn new(n: u64, s: u64, k: u64, eps: f64, beta: f64, domain: u64, mode: StreamMode) -> Self {
        Self { n, s, k, eps, beta, domain, mode, rows: None, deterministic: false, master_seed: 0 }
    }

    pub fn with_deterministic(mut self, on: bool) -> Self {
        self.deterministic = on;
        self
    }

    pub fn with_rows(mut self, rows: Option<usize>) -> Self {
        self.rows = rows;
        self
    }

    pub fn with_master_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }
}

/// Parameters derived once from a [`StreamConfig`] and shared by every
/// party and the aggregator.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamSetup {
    pub cfg: StreamConfig,
    pub sched: EpochSchedule,
    /// Epochs per dyadic frame: `m`, or `w / b` in sliding mode.
    pub frame_size: u64,
    /// Effective window in steps (sliding mode).
    pub window: Option<u64>,
    pub levels: Vec<inter::InterParams>,
    /// `None` when `b = 1`.
    pub intra: Option<IntraCodec>,
    /// Sketch domain: `u + 1`, the extra id being the padding item.
    pub sketch_domain: u64,
}

impl StreamSetup {
    pub fn new(cfg: StreamConfig) -> Result<Self> {
        if !(cfg.eps > 0.0) || !cfg.eps.is_finite() {
            return Err(invalid(format!("epsilon must be positive, got {}", cfg.eps)));
        }
        if cfg.domain == 0 {
            return Err(invalid("domain must be positive"));
        }
        if let Some(r) = cfg.rows {
            if r % 2 == 0 {
                return Err(invalid(format!("row override must be odd, got {r}")));
            }
        }
        let sched = epoch_schedule(cfg.n, cfg.s, cfg.k)?;
        let (frame_size, window) = match cfg.mode {
            StreamMode::Full => (sched.m, None),
            StreamMode::Sliding { w } => {
                if w == 0 {
                    return Err(invalid("window must be positive"));
                }
                let eff = w.div_ceil(sched.b) * sched.b;
                if eff != w {
                    log::warn!("window {w} is not a multiple of b = {}; using {eff}", sched.b);
                }
                (eff / sched.b, Some(eff))
            }
        };
        let levels = inter::level_params(&sched, frame_size, cfg.eps, cfg.beta, cfg.rows)?;
        let sketch_domain = cfg.domain + 1;
        let intra = if !sched.intra_enabled() {
            None
        } else if cfg.deterministic {
            Some(IntraCodec::deterministic(sketch_domain)?)
        } else {
            Some(IntraCodec::new(cfg.eps, sketch_domain, sched.p)?)
        };
        Ok(Self { cfg, sched, frame_size, window, levels, intra, sketch_domain })
    }

    pub fn dummy_item(&self) -> u64 {
        self.cfg.domain
    }

    /// Per-party privacy: HRR once per item, plus one block per level.
    pub fn ledger(&self) -> PrivacyLedger {
        let mut l = PrivacyLedger::new();
        if let Some(intra) = &self.intra {
            l.charge_rr("intra-epoch HRR", intra.rr());
        }
        for p in &self.levels {
            let noise = p.noise.with_disabled(self.cfg.deterministic);
            l.charge_geom(format!("level {} block sketch", p.level), noise, 2.0 * p.rows as f64);
        }
        l
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StreamPayload {
    Intra(IntraSample),
    Block { block: DyadicBlock, sketch: NoisyCountSketch },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamMessage {
    pub party: u64,
    /// Step at which the message was produced.
    pub t: u64,
    pub payload: StreamPayload,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_rounding_and_ledger() {
        let cfg = StreamConfig::new(64, 8, 4, 2.0, 0.01, 16, StreamMode::Sliding { w: 20 });
        let setup = StreamSetup::new(cfg).unwrap();
        assert_eq!(setup.sched.b, 8);
        assert_eq!(setup.window, Some(24));
        assert_eq!(setup.frame_size, 3);
        assert!((setup.ledger().total() - 2.0).abs() < 1e-9);
        let full = StreamSetup::new(StreamConfig { mode: StreamMode::Full, ..cfg }).unwrap();
        assert_eq!(full.levels.len(), 4);
        assert!((full.ledger().total() - 2.0).abs() < 1e-9);
        let b1 = StreamSetup::new(StreamConfig::new(5, 10, 1, 2.0, 0.01, 4, StreamMode::Full)).unwrap();
        assert!(b1.intra.is_none());
        assert!((b1.ledger().total() - 1.0).abs() < 1e-9);
    }
}
