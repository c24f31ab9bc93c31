// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Inter-epoch block sketches.

use rand::Rng;

use super::dyadic::{ceil_log2, level_count, DyadicBlock};
use super::EpochSchedule;
use crate::dpnoise::GeomParam;
use crate::error::{invalid, Result};
use crate::freq::FrequencyVector;
use crate::oneshot::odd_round;
use crate::sketch::{CountSketch, NoisyCountSketch};

/// Sketch shape and noise for one block level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterParams {
    pub level: u32,
    pub rows: usize,
    pub width: usize,
    pub noise: GeomParam,
}

/// `odd_round(log2(2k L / beta) / 2)` for `L` block levels.
pub fn block_rows(k: u64, levels: u32, beta: f64) -> usize {
    odd_round(0.5 * (2.0 * k as f64 * levels as f64 / beta).log2())
}

/// `ceil(s sqrt(ceil(log2 F)) 2^l b / n)`, at least 1.
pub fn block_width(sched: &EpochSchedule, frame_size: u64, level: u32) -> usize {
    let lg = f64::from(ceil_log2(frame_size));
    let w = (sched.s as f64 * lg.sqrt() * (1u64 << level) as f64 * sched.b as f64 / sched.n as f64).ceil();
    if w >= 1.0 {
        w as usize
    } else {
        1
    }
}

/// Per-level parameters for a frame of `frame_size` epochs. Every item falls
/// in one block per level, so each block sketch gets `eps / (2 L)`.
pub fn level_params(
    sched: &EpochSchedule,
    frame_size: u64,
    eps: f64,
    beta: f64,
    rows_override: Option<usize>,
) -> Result<Vec<InterParams>> {
    if !(eps > 0.0) || !(beta > 0.0 && beta < 1.0) {
        return Err(invalid("need eps > 0 and beta in (0, 1)"));
    }
    let levels = level_count(frame_size);
    let rows = rows_override.unwrap_or_else(|| block_rows(sched.k, levels, beta));
    (0..levels)
        .map(|level| {
            Ok(InterParams {
                level,
                rows,
                width: block_width(sched, frame_size, level),
                noise: GeomParam::new(eps / (2.0 * f64::from(levels)), 2.0 * rows as f64)?,
            })
        })
        .collect()
}

/// `(R_blk, width_blk, alpha_blk)` at level `l` of the full-stream structure.
pub fn inter_block_params(sched: &EpochSchedule, eps: f64, beta: f64, level: u32) -> Result<InterParams> {
    if sched.m < 2 {
        return Err(invalid("a single epoch needs no inter-epoch structure"));
    }
    let params = level_params(sched, sched.m, eps, beta, None)?;
    params.get(level as usize).copied().ok_or_else(|| invalid(format!("level {level} beyond the dyadic depth")))
}

/// Sketches a completed block's items and perturbs it.
pub fn inter_party_block<R: Rng + ?Sized>(
    items: &FrequencyVector,
    params: &InterParams,
    domain: u64,
    hash_seed: u64,
    deterministic: bool,
    rng: &mut R,
) -> Result<NoisyCountSketch> {
    empty_block_sketch(params, domain, hash_seed, deterministic)?.build(items)?.add_noise(params.noise.with_disabled(deterministic), rng)
}

pub(crate) fn empty_block_sketch(params: &InterParams, domain: u64, hash_seed: u64, deterministic: bool) -> Result<CountSketch> {
    if deterministic {
        CountSketch::identity(params.rows, params.width.max(domain as usize), domain, hash_seed)
    } else {
        CountSketch::new(params.rows, params.width, domain, hash_seed)
    }
}

/// Public hash seed of one party's block.
pub fn block_seed(master: u64, party: u64, block: &DyadicBlock) -> u64 {
    use crate::hashing::{derive_seed, subseed, Purpose};
    let base = derive_seed(master, party, Purpose::Block, block.frame);
    subseed(subseed(base, u64::from(block.level)), block.index)
}
