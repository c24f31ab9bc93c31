// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Hadamard randomized response: a one-bit frequency oracle.

use rand::Rng;

use crate::dpnoise::RrParam;
use crate::error::{invalid, Result};

/// Smallest power of two `>= domain` (at least 1).
pub fn pad_pow2(domain: u64) -> u64 {
    domain.max(1).next_power_of_two()
}

/// `H[r, c] = (-1)^popcount(r & c)` for the `dim x dim` Sylvester matrix.
pub fn hadamard_entry(r: u64, c: u64, dim: u64) -> Result<i64> {
    if !dim.is_power_of_two() {
        return Err(invalid(format!("Hadamard dimension {dim} is not a power of two")));
    }
    if r >= dim || c >= dim {
        return Err(invalid(format!("Hadamard index ({r}, {c}) outside {dim}x{dim}")));
    }
    Ok(entry(r, c))
}

#[inline]
pub(crate) fn entry(r: u64, c: u64) -> i64 {
    if (r & c).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(row, bit)`: one randomized entry of the sender's Hadamard column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HrrMessage {
    pub row: u64,
    pub bit: i8,
}

/// HRR encoder/estimator bound to a privacy level and a padded domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hrr {
    rr: RrParam,
    dim: u64,
}

impl Hrr {
    pub fn new(rr: RrParam, domain: u64) -> Result<Self> {
        if domain == 0 {
            return Err(invalid("HRR domain must be positive"));
        }
        Ok(Self { rr, dim: pad_pow2(domain) })
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn rr(&self) -> RrParam {
        self.rr
    }

    pub fn encode<R: Rng + ?Sized>(&self, item: u64, rng: &mut R) -> Result<HrrMessage> {
        if item >= self.dim {
            return Err(invalid(format!("item {item} outside padded domain {}", self.dim)));
        }
        let row = rng.random_range(0..self.dim);
        let bit = self.rr.flip(entry(row, item), rng);
        Ok(HrrMessage { row, bit: bit as i8 })
    }

    /// Unbiased estimate of `[sender's item == item]` from one message.
    #[inline]
    pub fn message_estimate(&self, msg: &HrrMessage, item: u64) -> f64 {
        self.rr.debias() * (i64::from(msg.bit) * entry(msg.row, item)) as f64
    }

    pub fn estimate<'a, I>(&self, msgs: I, item: u64) -> f64
    where
        I: IntoIterator<Item = &'a HrrMessage>,
    {
        let sum: i64 = msgs.into_iter().map(|m| i64::from(m.bit) * entry(m.row, item)).sum();
        self.rr.debias() * sum as f64
    }
}

pub fn hrr_encode<R: Rng + ?Sized>(item: u64, rr: RrParam, dim: u64, rng: &mut R) -> Result<HrrMessage> {
    if !dim.is_power_of_two() {
        return Err(invalid(format!("Hadamard dimension {dim} is not a power of two")));
    }
    Hrr { rr, dim }.encode(item, rng)
}

/// `(e^eps+1)/(e^eps-1) * sum_i bit_i H[r_i, item]`.
pub fn hrr_estimate(msgs: &[HrrMessage], item: u64, rr: RrParam) -> f64 {
    let sum: i64 = msgs.iter().map(|m| i64::from(m.bit) * entry(m.row, item)).sum();
    rr.debias() * sum as f64
}
