// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use crate::error::{invalid, Result};
use crate::freq::FrequencyVector;
use crate::hashing::seeded_rng;

/// Assigns every item to a uniformly random party. Empty parties then take
/// one item from the currently largest party.
pub fn partition_uniform(items: &[u64], k: usize, seed: u64) -> Result<Vec<Vec<u64>>> {
    if k == 0 || items.len() < k {
        return Err(invalid(format!("cannot split {} items across {k} parties", items.len())));
    }
    let mut rng = seeded_rng(seed);
    let mut parts = vec![Vec::with_capacity(items.len() / k + 1); k];
    for &item in items {
        parts[rng.random_range(0..k)].push(item);
    }
    for i in 0..k {
        if parts[i].is_empty() {
            let largest = (0..k).max_by_key(|&j| parts[j].len()).expect("k >= 1");
            let moved = parts[largest].pop().expect("largest party is nonempty");
            parts[i].push(moved);
        }
    }
    Ok(parts)
}

pub fn to_frequency_vectors(parts: &[Vec<u64>]) -> Vec<FrequencyVector> {
    parts.iter().map(|p| FrequencyVector::from_items(p.iter().copied())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conservation_and_nonempty() {
        let items: Vec<u64> = (0..1000).map(|i| i % 37).collect();
        for k in [1, 2, 10, 999, 1000] {
            let parts = partition_uniform(&items, k, 3).unwrap();
            assert_eq!(parts.len(), k);
            assert!(parts.iter().all(|p| !p.is_empty()));
            let mut all: Vec<u64> = parts.concat();
            all.sort_unstable();
            let mut want = items.clone();
            want.sort_unstable();
            assert_eq!(all, want);
        }
        assert_eq!(partition_uniform(&items, 1, 0).unwrap()[0], items);
        assert!(partition_uniform(&items, 1001, 0).is_err());
    }

    #[test]
    fn balanced_loads() {
        let items = vec![0u64; 100_000];
        let bound = 1000.0 + 3.0 * (1000.0 * 100f64.ln()).sqrt();
        for seed in 0..20 {
            let parts = partition_uniform(&items, 100, seed).unwrap();
            let max = parts.iter().map(Vec::len).max().unwrap();
            assert!(max as f64 <= bound, "seed {seed}: {max}");
        }
    }
}
