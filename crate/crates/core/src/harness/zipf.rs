// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

use rand_distr::{Distribution, Zipf};

use crate::error::{invalid, Result};
use crate::hashing::seeded_rng;

/// `n` i.i.d. items of `[0, u)` with `Pr[item r-1] ∝ r^{-skew}`.
pub fn zipf_generate(u: u64, n: usize, skew: f64, seed: u64) -> Result<Vec<u64>> {
    if u < 2 || n == 0 || !(skew > 0.0) {
        return Err(invalid("zipf needs u >= 2, N >= 1 and skew > 0"));
    }
    let dist = Zipf::new(u as f64, skew).map_err(|e| invalid(format!("zipf: {e}")))?;
    let mut rng = seeded_rng(seed);
    Ok((0..n).map(|_| dist.sample(&mut rng) as u64 - 1).collect())
}
