// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Frequency separation.
//!
//! Each party splits its items with a noisy threshold `T`. Local heavy
//! hitters are sent as Horvitz-Thompson samples in an odd number of
//! repetitions; the rest go into a small basic-protocol sketch sized by a
//! noisy upper bound on the light count.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::basic::{noisy_sketch, BasicAggregator, BasicMessage};
use super::{odd_round, party_width, FrequencyOracle, OneShotConfig, PartyDataset};
use crate::dpnoise::{binomial_sample, GeomParam};
use crate::error::{invalid, Error, Result};
use crate::freq::FrequencyVector;
use crate::privacy::PrivacyLedger;

/// `ceil((8/eps) ln(k u)) + 1`.
pub fn threshold_t(eps: f64, k: usize, u: u64) -> u64 {
    let t = (8.0 / eps * (k as f64 * u as f64).ln()).ceil();
    if t.is_finite() && t > 0.0 {
        t as u64 + 1
    } else {
        1
    }
}

/// `Pr[xi >= T]` for `xi ~ Geom(e^{eps/4})`: `exp((1-T) eps/4) / (exp(eps/4) + 1)`.
pub fn p_t(eps: f64, t: u64) -> f64 {
    ((1.0 - t as f64) * eps / 4.0).exp() / ((eps / 4.0).exp() + 1.0)
}

/// `odd_round(log2(1/beta) / 2)`.
pub fn heavy_reps(beta: f64) -> usize {
    odd_round(0.5 * (1.0 / beta).log2())
}

/// `odd_round(log2(3k/beta) / 4)`.
pub fn light_rows(k: usize, beta: f64) -> usize {
    odd_round(0.25 * (3.0 * k as f64 / beta).log2())
}

/// Importance-sampling probability `min(k s x / N, 1)`.
pub fn sample_prob(x: f64, k: usize, s: f64, n_total: u64) -> f64 {
    (k as f64 * s * x.abs() / n_total as f64).min(1.0)
}

/// Noise of the heavy/light split on the frequency vector (sensitivity 2).
pub fn split_noise(eps: f64) -> Result<GeomParam> {
    GeomParam::new(eps / 2.0, 2.0)
}

/// Per-repetition heavy noise: `Geom(e^{eps'/2})`, `eps' = eps / (2 reps)`.
pub fn heavy_noise(eps: f64, reps: usize) -> Result<GeomParam> {
    GeomParam::new(eps / (2.0 * reps as f64), 2.0)
}

pub fn light_size_noise(eps: f64) -> Result<GeomParam> {
    GeomParam::new(eps / 4.0, 1.0)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeavyLightSplit {
    /// Item to true local count; may contain zero-count items.
    pub heavy: BTreeMap<u64, u64>,
    pub light: FrequencyVector,
}

/// `m` distinct uniform items of `[0, u)` outside the support of `data`.
fn sample_absent<R: Rng + ?Sized>(u: u64, data: &FrequencyVector, m: u64, rng: &mut R) -> Vec<u64> {
    let free = u - data.support_len() as u64;
    let m = m.min(free);
    if m == 0 {
        return Vec::new();
    }
    if 2 * m > free {
        let mut pool: Vec<u64> = (0..u).filter(|j| !data.contains(*j)).collect();
        let (chosen, _) = pool.partial_shuffle(rng, m as usize);
        return chosen.to_vec();
    }
    let mut seen = HashSet::with_capacity(m as usize);
    let mut out = Vec::with_capacity(m as usize);
    while (out.len() as u64) < m {
        let j = rng.random_range(0..u);
        if !data.contains(j) && seen.insert(j) {
            out.push(j);
        }
    }
    out
}

/// Noisy threshold split. Support entries compare `x + Geom(e^{eps/4}) >= T`;
/// the absent entries that would cross `T` are drawn in one Binomial step.
pub fn split_heavy_light<R: Rng + ?Sized>(
    data: &FrequencyVector,
    eps: f64,
    t: u64,
    u: u64,
    deterministic: bool,
    rng: &mut R,
) -> Result<HeavyLightSplit> {
    if t == 0 {
        return Err(invalid("threshold must be at least 1"));
    }
    data.check_domain(u)?;
    let noise = split_noise(eps)?.with_disabled(deterministic);
    let mut split = HeavyLightSplit::default();
    for (j, x) in data.iter() {
        let noisy = x as i64 + noise.sample(rng);
        if noisy >= t as i64 {
            split.heavy.insert(j, x);
        } else {
            split.light.add(j, x);
        }
    }
    if !deterministic {
        let free = u - data.support_len() as u64;
        let m = binomial_sample(free, p_t(eps, t), rng)?;
        for j in sample_absent(u, data, m, rng) {
            split.heavy.insert(j, 0);
        }
    }
    Ok(split)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeavySample {
    pub rep: u32,
    pub item: u64,
    /// `x_hat / p(|x_hat|)`.
    pub value: f64,
}

/// One list of samples per repetition, flattened with the repetition index.
pub fn heavy_party_messages<R: Rng + ?Sized>(
    heavy: &BTreeMap<u64, u64>,
    cfg: &OneShotConfig,
    reps: usize,
    rng: &mut R,
) -> Result<Vec<HeavySample>> {
    let noise = heavy_noise(cfg.eps, reps)?.with_disabled(cfg.deterministic);
    let mut out = Vec::new();
    for rep in 0..reps as u32 {
        for (&item, &x) in heavy {
            let x_hat = x as i64 + noise.sample(rng);
            let p = if cfg.deterministic { 1.0 } else { sample_prob(x_hat as f64, cfg.k, cfg.s, cfg.n_total) };
            if p > 0.0 && (p >= 1.0 || rng.random::<f64>() < p) {
                out.push(HeavySample { rep, item, value: x_hat as f64 / p });
            }
        }
    }
    Ok(out)
}

/// `min(n_lo + (8/eps) log2(2k/beta) + Geom(e^{eps/4}), n_i)`, at least 1.
pub fn light_noisy_size<R: Rng + ?Sized>(
    n_lo: u64,
    n_i: u64,
    eps: f64,
    beta: f64,
    k: usize,
    noise_disabled: bool,
    rng: &mut R,
) -> Result<f64> {
    if n_lo > n_i {
        return Err(invalid(format!("light count {n_lo} exceeds local count {n_i}")));
    }
    let noise = light_size_noise(eps)?.with_disabled(noise_disabled);
    let shift = 8.0 / eps * (2.0 * k as f64 / beta).log2();
    let v = n_lo as f64 + shift + noise.sample(rng) as f64;
    Ok(v.min(n_i as f64).max(1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreqSepMessage {
    pub party: u64,
    pub reps: usize,
    pub heavy: Vec<HeavySample>,
    pub light_size: f64,
    pub light: BasicMessage,
}

pub fn freqsep_party_message<R: Rng + ?Sized>(
    party: &PartyDataset,
    cfg: &OneShotConfig,
    hash_seed: u64,
    rng: &mut R,
) -> Result<FreqSepMessage> {
    let t = threshold_t(cfg.eps, cfg.k, cfg.domain);
    let split = split_heavy_light(party.data(), cfg.eps, t, cfg.domain, cfg.deterministic, rng)?;
    let reps = heavy_reps(cfg.beta);
    let heavy = heavy_party_messages(&split.heavy, cfg, reps, rng)?;
    let n_lo = split.light.total();
    let light_size = light_noisy_size(n_lo, party.len(), cfg.eps, cfg.beta, cfg.k, cfg.deterministic, rng)?;
    let rows = light_rows(cfg.k, cfg.beta);
    let width = party_width(cfg.k, cfg.s, light_size, cfg.n_total);
    let sketch = noisy_sketch(&split.light, rows, width, cfg.domain, cfg.eps / 4.0, hash_seed, cfg.deterministic, rng)?;
    Ok(FreqSepMessage { party: party.id(), reps, heavy, light_size, light: BasicMessage { party: party.id(), sketch } })
}

/// Split, then heavy and light in parallel over disjoint item sets.
pub fn freqsep_ledger(cfg: &OneShotConfig, light_rows: usize) -> Result<PrivacyLedger> {
    let off = cfg.deterministic;
    let reps = heavy_reps(cfg.beta);
    let mut heavy = PrivacyLedger::new();
    for r in 0..reps {
        heavy.charge_geom(format!("heavy repetition {r}"), heavy_noise(cfg.eps, reps)?.with_disabled(off), 2.0);
    }
    let mut light = PrivacyLedger::new();
    light.charge_geom("light size", light_size_noise(cfg.eps)?.with_disabled(off), 1.0);
    let sketch_noise = GeomParam::new(cfg.eps / 4.0, 2.0 * light_rows as f64)?.with_disabled(off);
    light.charge_geom("light sketch", sketch_noise, 2.0 * light_rows as f64);
    let mut l = PrivacyLedger::new();
    l.charge_geom("split", split_noise(cfg.eps)?.with_disabled(off), 2.0);
    l.parallel("heavy | light", vec![heavy, light]);
    Ok(l)
}

/// Median over repetitions of the per-repetition HT sums.
#[derive(Clone, Debug)]
pub struct HeavyAggregator {
    sums: Vec<HashMap<u64, f64>>,
}

impl HeavyAggregator {
    pub fn new(reps: usize) -> Result<Self> {
        if reps == 0 || reps % 2 == 0 {
            return Err(invalid(format!("repetition count must be odd, got {reps}")));
        }
        Ok(Self { sums: vec![HashMap::new(); reps] })
    }

    pub fn reps(&self) -> usize {
        self.sums.len()
    }

    pub fn ingest(&mut self, samples: &[HeavySample]) -> Result<()> {
        for s in samples {
            let rep = self
                .sums
                .get_mut(s.rep as usize)
                .ok_or_else(|| Error::ProtocolViolation(format!("repetition {} out of range", s.rep)))?;
            *rep.entry(s.item).or_insert(0.0) += s.value;
        }
        Ok(())
    }

    pub fn rep_estimate(&self, rep: usize, item: u64) -> f64 {
        self.sums[rep].get(&item).copied().unwrap_or(0.0)
    }

    pub fn estimate(&self, item: u64) -> f64 {
        let mut v: Vec<f64> = (0..self.reps()).map(|r| self.rep_estimate(r, item)).collect();
        let mid = v.len() / 2;
        *v.select_nth_unstable_by(mid, f64::total_cmp).1
    }
}

#[derive(Clone, Debug)]
pub struct FreqSepAggregator {
    heavy: HeavyAggregator,
    light: BasicAggregator,
}

impl FreqSepAggregator {
    pub fn new(beta: f64) -> Result<Self> {
        Ok(Self { heavy: HeavyAggregator::new(heavy_reps(beta))?, light: BasicAggregator::new() })
    }

    pub fn ingest(&mut self, msg: FreqSepMessage) -> Result<()> {
        if msg.reps != self.heavy.reps() {
            return Err(Error::ProtocolViolation(format!("party {} used {} repetitions", msg.party, msg.reps)));
        }
        self.light.ingest(msg.light)?;
        self.heavy.ingest(&msg.heavy)
    }

    pub fn heavy(&self) -> &HeavyAggregator {
        &self.heavy
    }

    pub fn light(&self) -> &BasicAggregator {
        &self.light
    }
}

impl FrequencyOracle for FreqSepAggregator {
    fn estimate(&self, item: u64) -> Result<f64> {
        Ok(self.heavy.estimate(item) + self.light.estimate(item)?)
    }
}
