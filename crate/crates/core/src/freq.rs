// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use crate::error::{invalid, Result};

/// Exact sparse counts over the domain `[0, u)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequencyVector {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl FrequencyVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_items<I: IntoIterator<Item = u64>>(items: I) -> Self {
        let mut v = Self::new();
        for item in items {
            v.add(item, 1);
        }
        v
    }

    pub fn from_counts<I: IntoIterator<Item = (u64, u64)>>(counts: I) -> Self {
        let mut v = Self::new();
        for (item, c) in counts {
            v.add(item, c);
        }
        v
    }

    pub fn add(&mut self, item: u64, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(item).or_insert(0) += count;
        self.total += count;
    }

    pub fn get(&self, item: u64) -> u64 {
        self.counts.get(&item).copied().unwrap_or(0)
    }

    /// `n = sum_j x_j`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn items(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.keys().copied()
    }

    pub fn contains(&self, item: u64) -> bool {
        self.counts.contains_key(&item)
    }

    pub fn max_item(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    pub fn l2_squared(&self) -> f64 {
        self.counts.values().map(|&c| (c as f64).powi(2)).sum()
    }

    pub fn merge(&mut self, other: &FrequencyVector) {
        for (item, c) in other.iter() {
            self.add(item, c);
        }
    }

    /// Keeps only the listed items.
    pub fn restrict<'a, I: IntoIterator<Item = &'a u64>>(&self, items: I) -> FrequencyVector {
        let mut out = FrequencyVector::new();
        for &item in items {
            out.add(item, self.get(item));
        }
        out
    }

    pub fn check_domain(&self, domain: u64) -> Result<()> {
        match self.max_item() {
            Some(m) if m >= domain => Err(invalid(format!("item {m} outside domain [0, {domain})"))),
            _ => Ok(()),
        }
    }
}

impl FromIterator<u64> for FrequencyVector {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        Self::from_items(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_totals() {
        let v = FrequencyVector::from_items([3, 1, 3, 3]);
        assert_eq!(v.get(3), 3);
        assert_eq!(v.get(2), 0);
        assert_eq!(v.total(), 4);
        assert_eq!(v.support_len(), 2);
        assert_eq!(v.l2_squared(), 10.0);
        assert!(v.check_domain(4).is_ok());
        assert!(v.check_domain(3).is_err());
        let r = v.restrict(&[3]);
        assert_eq!(r.total(), 3);
    }
}
