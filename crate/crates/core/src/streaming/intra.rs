// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Intra-epoch reporting: each step is sampled with probability `p` and the
//! sampled item is sent as one HRR message at `eps/2`.

use rand::Rng;

use super::EpochSchedule;
use crate::dpnoise::RrParam;
use crate::error::{invalid, Result};
use crate::sketch::hadamard::entry;
use crate::sketch::{Hrr, HrrMessage};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntraSample {
    pub party: u64,
    pub t: u64,
    pub msg: HrrMessage,
}

/// Sampling and encoding rules shared by parties and the aggregator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntraCodec {
    hrr: Hrr,
    p: f64,
    /// Send every row of the Hadamard column instead of one random row.
    exhaustive: bool,
}

impl IntraCodec {
    pub fn new(eps: f64, domain: u64, p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(invalid(format!("sampling probability {p} outside (0, 1]")));
        }
        Ok(Self { hrr: Hrr::new(RrParam::new(eps / 2.0)?, domain)?, p, exhaustive: false })
    }

    /// No flips, every step sampled, full columns: exact counts.
    pub fn deterministic(domain: u64) -> Result<Self> {
        Ok(Self { hrr: Hrr::new(RrParam::disabled(), domain)?, p: 1.0, exhaustive: true })
    }

    pub fn rr(&self) -> RrParam {
        self.hrr.rr()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> u64 {
        self.hrr.dim()
    }

    pub fn encode<R: Rng + ?Sized>(&self, party: u64, item: u64, t: u64, rng: &mut R) -> Result<Vec<IntraSample>> {
        if self.exhaustive {
            if item >= self.dim() {
                return Err(invalid(format!("item {item} outside padded domain")));
            }
            let col = (0..self.dim()).map(|row| IntraSample { party, t, msg: HrrMessage { row, bit: entry(row, item) as i8 } });
            return Ok(col.collect());
        }
        if self.p < 1.0 && rng.random::<f64>() >= self.p {
            return Ok(Vec::new());
        }
        Ok(vec![IntraSample { party, t, msg: self.hrr.encode(item, rng)? }])
    }

    /// `(1/p) sum_i` of per-message HRR estimates.
    pub fn estimate<'a, I>(&self, samples: I, item: u64) -> f64
    where
        I: IntoIterator<Item = &'a IntraSample>,
    {
        let raw = self.hrr.estimate(samples.into_iter().map(|s| &s.msg), item);
        let per_item = if self.exhaustive { self.dim() as f64 } else { 1.0 };
        raw / (self.p * per_item)
    }
}

/// One party at one step: `Some` sample with probability `p = 1/b`.
pub fn intra_party_step<R: Rng + ?Sized>(
    party: u64,
    item: u64,
    t: u64,
    sched: &EpochSchedule,
    eps: f64,
    domain: u64,
    rng: &mut R,
) -> Result<Option<IntraSample>> {
    if !sched.intra_enabled() {
        return Err(invalid("intra-epoch reporting needs b > 1"));
    }
    Ok(IntraCodec::new(eps, domain, sched.p)?.encode(party, item, t, rng)?.pop())
}

pub fn intra_estimate(samples: &[IntraSample], item: u64, sched: &EpochSchedule, eps: f64, domain: u64) -> Result<f64> {
    Ok(IntraCodec::new(eps, domain, sched.p)?.estimate(samples, item))
}
