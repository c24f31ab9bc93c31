// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

use crate::error::{invalid, Result};

/// Epochs of `b = ceil(n/s)` steps; `m = ceil(n/b)` of them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochSchedule {
    pub n: u64,
    pub s: u64,
    pub k: u64,
    /// `b * sqrt(k)`.
    pub delta: f64,
    pub b: u64,
    pub m: u64,
    /// Intra-epoch sampling probability `1/b`.
    pub p: f64,
}

pub fn epoch_schedule(n: u64, s: u64, k: u64) -> Result<EpochSchedule> {
    if n == 0 || s == 0 || k == 0 {
        return Err(invalid("n, s and k must all be positive"));
    }
    let b = n.div_ceil(s);
    let m = n.div_ceil(b);
    Ok(EpochSchedule { n, s, k, delta: b as f64 * (k as f64).sqrt(), b, m, p: 1.0 / b as f64 })
}

impl EpochSchedule {
    pub fn intra_enabled(&self) -> bool {
        self.b > 1
    }

    /// 1-based epoch containing step `t >= 1`.
    pub fn epoch_of(&self, t: u64) -> u64 {
        (t - 1) / self.b + 1
    }

    /// Epochs fully elapsed at step `t`.
    pub fn complete_epochs(&self, t: u64) -> u64 {
        t / self.b
    }

    /// Steps after `n` that pad the last epoch with dummy items.
    pub fn padding(&self) -> u64 {
        self.b * self.m - self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let s = epoch_schedule(12, 3, 4).unwrap();
        assert_eq!((s.delta, s.b, s.m), (8.0, 4, 3));
        let s = epoch_schedule(10, 3, 4).unwrap();
        assert_eq!((s.b, s.m, s.padding()), (4, 3, 2));
        let s = epoch_schedule(5, 10, 1).unwrap();
        assert_eq!((s.b, s.m), (1, 5));
        assert!(!s.intra_enabled());
        assert!(epoch_schedule(0, 1, 1).is_err());
    }

    #[test]
    fn invariants_over_grid() {
        for n in 1..200 {
            for s in 1..60 {
                let sc = epoch_schedule(n, s, 3).unwrap();
                assert!(sc.b >= 1 && sc.p > 0.0 && sc.p <= 1.0);
                assert!(sc.m <= n.min(s) + 1);
                assert!(sc.b * sc.m >= n && sc.b * (sc.m - 1) < n);
                assert_eq!(sc.epoch_of(n), sc.m);
            }
        }
    }
}
