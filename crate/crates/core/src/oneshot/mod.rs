// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! One-shot protocols: every party sends a single message.
//!
//! * [`basic`]: one noisy count sketch per party, sized by its local count.
//! * [`ldp`]: the one-item-per-party case, with sparse Elias-coded messages.
//! * [`freqsep`]: local heavy hitters by importance sampling, the rest by sketch.
//! * [`baseline`]: the shared-hash Noisy-CS comparison point.

pub mod baseline;
pub mod basic;
pub mod freqsep;
pub mod ldp;

use crate::error::{invalid, Result};
use crate::freq::FrequencyVector;

/// Nearest odd integer to `x`, ties toward the larger odd, at least 1.
pub fn odd_round(x: f64) -> usize {
    if !(x > 1.0) {
        return 1;
    }
    let half = ((x - 1.0) / 2.0 + 0.5).floor();
    2 * half as usize + 1
}

/// `odd_round(log2(3k / beta))`.
pub fn basic_rows(k: usize, beta: f64) -> usize {
    odd_round((3.0 * k as f64 / beta).log2())
}

/// `ceil(k * s * n_i / N)`, at least 1.
pub fn party_width(k: usize, s: f64, n_i: f64, n_total: u64) -> usize {
    let w = (k as f64 * s * n_i / n_total as f64).ceil();
    if w.is_finite() && w >= 1.0 {
        w as usize
    } else {
        1
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneShotConfig {
    pub eps: f64,
    pub beta: f64,
    /// Average message size.
    pub s: f64,
    pub k: usize,
    /// Total item count `N`.
    pub n_total: u64,
    /// Domain size `u`.
    pub domain: u64,
    /// Overrides the computed sketch row count.
    pub rows: Option<usize>,
    /// Noise, randomized sampling and hash collisions all switched off.
    pub deterministic: bool,
}

impl OneShotConfig {
    pub fn new(eps: f64, beta: f64, s: f64, k: usize, n_total: u64, domain: u64) -> Result<Self> {
        let cfg = Self { eps, beta, s, k, n_total, domain, rows: None, deterministic: false };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rows(mut self, rows: usize) -> Result<Self> {
        if rows == 0 || rows % 2 == 0 {
            return Err(invalid(format!("row override must be odd and positive, got {rows}")));
        }
        self.rows = Some(rows);
        Ok(self)
    }

    pub fn with_deterministic(mut self, on: bool) -> Self {
        self.deterministic = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(invalid(format!("epsilon must be positive, got {}", self.eps)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(invalid(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.s >= 1.0) || !self.s.is_finite() {
            return Err(invalid(format!("s must be at least 1, got {}", self.s)));
        }
        if self.k == 0 {
            return Err(invalid("at least one party is required"));
        }
        if self.n_total < self.k as u64 {
            return Err(invalid(format!("N = {} is below k = {}", self.n_total, self.k)));
        }
        if self.domain == 0 {
            return Err(invalid("domain must be positive"));
        }
        Ok(())
    }

    /// Row count of the basic protocol's sketches.
    pub fn basic_rows(&self) -> usize {
        self.rows.unwrap_or_else(|| basic_rows(self.k, self.beta))
    }
}

/// One party's local multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyDataset {
    id: u64,
    data: FrequencyVector,
}

impl PartyDataset {
    pub fn new(id: u64, data: FrequencyVector) -> Result<Self> {
        if data.is_empty() {
            return Err(invalid(format!("party {id} holds no items")));
        }
        Ok(Self { id, data })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn data(&self) -> &FrequencyVector {
        &self.data
    }

    /// `n_i`.
    pub fn len(&self) -> u64 {
        self.data.total()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Aggregator-side point query.
pub trait FrequencyOracle {
    fn estimate(&self, item: u64) -> Result<f64>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_rounding_examples() {
        assert_eq!(odd_round(14.87), 15);
        assert_eq!(odd_round(3.72), 3);
        assert_eq!(odd_round(3.32), 3);
        assert_eq!(odd_round(8.14), 9);
        assert_eq!(odd_round(2.0), 3);
        assert_eq!(odd_round(4.0), 5);
        assert_eq!(odd_round(0.3), 1);
        assert_eq!(basic_rows(100, 0.01), 15);
    }

    #[test]
    fn width_examples() {
        assert_eq!(party_width(100, 50.0, 20.0, 1000), 100);
        assert_eq!(party_width(100, 1.0, 1.0, 1_000_000), 1);
    }

    #[test]
    fn config_validation() {
        assert!(OneShotConfig::new(2.0, 0.01, 4.0, 8, 64, 16).is_ok());
        assert!(OneShotConfig::new(0.0, 0.01, 4.0, 8, 64, 16).is_err());
        assert!(OneShotConfig::new(2.0, 1.0, 4.0, 8, 64, 16).is_err());
        assert!(OneShotConfig::new(2.0, 0.01, 4.0, 8, 7, 16).is_err());
        assert!(OneShotConfig::new(2.0, 0.01, 4.0, 0, 64, 16).is_err());
        let c = OneShotConfig::new(2.0, 0.01, 4.0, 8, 64, 16).unwrap();
        assert!(c.with_rows(4).is_err());
        assert_eq!(c.with_rows(5).unwrap().basic_rows(), 5);
        assert!(PartyDataset::new(0, FrequencyVector::new()).is_err());
    }
}
