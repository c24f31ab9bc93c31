// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Count sketch, its noisy variant, and the Hadamard randomized response codec.
//!
//! A sketch with `R` rows and `width` columns stores, per row `r` and column
//! `c`, the signed sum `sum_{i : h_r(i) = c} g_r(i) x_i`. Point estimates take the
//! median of `g_r(j) C[r, h_r(j)]` over the (odd number of) rows.

mod codec;
pub mod hadamard;

pub use codec::{SKETCH_HEADER_WORDS, SKETCH_MAGIC};
pub use hadamard::{hadamard_entry, hrr_encode, hrr_estimate, pad_pow2, Hrr, HrrMessage};

use rand::Rng;

use crate::dpnoise::GeomParam;
use crate::error::{invalid, Error, Result};
use crate::freq::FrequencyVector;
use crate::hashing::{subseed, PairwiseHash, SignHash};

/// The hash pair of one sketch row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowHashes {
    pub bucket: PairwiseHash,
    pub sign: SignHash,
}

/// Where a sketch's hash functions come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HashSource {
    /// Both hashes of every row derived from one seed.
    Seeded(u64),
    /// Identity bucket hash (`width >= domain`), seeded signs.
    Identity(u64),
    /// Hashes supplied directly.
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSketch {
    rows: Vec<RowHashes>,
    width: usize,
    domain: u64,
    counters: Vec<i64>,
    source: HashSource,
}

fn check_shape(rows: usize, width: usize, domain: u64) -> Result<()> {
    if rows == 0 || rows % 2 == 0 {
        return Err(invalid(format!("sketch needs an odd, positive row count, got {rows}")));
    }
    if width == 0 {
        return Err(invalid("sketch width must be positive"));
    }
    if domain == 0 {
        return Err(invalid("sketch domain must be positive"));
    }
    Ok(())
}

impl CountSketch {
    /// Empty sketch whose row `r` hashes are drawn from sub-seeds `2r` and `2r+1`.
    pub fn new(rows: usize, width: usize, domain: u64, seed: u64) -> Result<Self> {
        check_shape(rows, width, domain)?;
        let hashes = (0..rows as u64)
            .map(|r| {
                Ok(RowHashes {
                    bucket: PairwiseHash::draw(subseed(seed, 2 * r), domain, width as u64)?,
                    sign: SignHash::draw(subseed(seed, 2 * r + 1), domain)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(hashes, width, domain, HashSource::Seeded(seed)))
    }

    /// Collision-free sketch: `h_r(x) = x`, so `width` must cover the domain.
    pub fn identity(rows: usize, width: usize, domain: u64, seed: u64) -> Result<Self> {
        check_shape(rows, width, domain)?;
        let bucket = PairwiseHash::identity(domain, width as u64)?;
        let hashes = (0..rows as u64)
            .map(|r| Ok(RowHashes { bucket, sign: SignHash::draw(subseed(seed, 2 * r + 1), domain)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(hashes, width, domain, HashSource::Identity(seed)))
    }

    pub fn with_hashes(rows: Vec<RowHashes>, width: usize) -> Result<Self> {
        let domain = rows.first().map(|r| r.bucket.domain()).unwrap_or(0);
        check_shape(rows.len(), width, domain)?;
        for row in &rows {
            if row.bucket.range() != width as u64 {
                return Err(invalid("bucket hash range differs from sketch width"));
            }
            if row.bucket.domain() != domain || row.sign.inner().domain() != domain {
                return Err(invalid("row hashes disagree on the domain"));
            }
        }
        Ok(Self::assemble(rows, width, domain, HashSource::Explicit))
    }

    fn assemble(rows: Vec<RowHashes>, width: usize, domain: u64, source: HashSource) -> Self {
        let counters = vec![0; rows.len() * width];
        Self { rows, width, domain, counters, source }
    }

    /// Empty sketch sharing this sketch's shape and hash functions.
    pub fn empty_like(&self) -> Self {
        Self { counters: vec![0; self.counters.len()], ..self.clone() }
    }

    pub fn build(mut self, x: &FrequencyVector) -> Result<Self> {
        x.check_domain(self.domain)?;
        for (item, count) in x.iter() {
            let delta = i64::try_from(count).map_err(|_| Error::Overflow)?;
            self.add_unchecked(item, delta)?;
        }
        Ok(self)
    }

    pub fn update(&mut self, item: u64, delta: i64) -> Result<()> {
        if item >= self.domain {
            return Err(invalid(format!("item {item} outside domain [0, {})", self.domain)));
        }
        self.add_unchecked(item, delta)
    }

    fn add_unchecked(&mut self, item: u64, delta: i64) -> Result<()> {
        for (r, row) in self.rows.iter().enumerate() {
            let c = r * self.width + row.bucket.bucket(item) as usize;
            let signed = delta.checked_mul(row.sign.sign(item)).ok_or(Error::Overflow)?;
            self.counters[c] = self.counters[c].checked_add(signed).ok_or(Error::Overflow)?;
        }
        Ok(())
    }

    pub fn estimate(&self, item: u64) -> Result<f64> {
        if item >= self.domain {
            return Err(invalid(format!("item {item} outside domain [0, {})", self.domain)));
        }
        Ok(self.estimate_unchecked(item))
    }

    /// Median over rows of `g_r(j) C[r, h_r(j)]`.
    pub(crate) fn estimate_unchecked(&self, item: u64) -> f64 {
        let rows = self.rows.len();
        if rows == 1 {
            return self.row_estimate(0, item) as f64;
        }
        let mut buf = [0i64; 64];
        if rows <= buf.len() {
            for (r, slot) in buf[..rows].iter_mut().enumerate() {
                *slot = self.row_estimate(r, item);
            }
            let (_, mid, _) = buf[..rows].select_nth_unstable(rows / 2);
            *mid as f64
        } else {
            let mut v: Vec<i64> = (0..rows).map(|r| self.row_estimate(r, item)).collect();
            let (_, mid, _) = v.select_nth_unstable(rows / 2);
            *mid as f64
        }
    }

    #[inline]
    pub(crate) fn row_estimate(&self, r: usize, item: u64) -> i64 {
        let row = &self.rows[r];
        row.sign.sign(item) * self.counters[r * self.width + row.bucket.bucket(item) as usize]
    }

    pub fn row_estimates(&self, item: u64) -> Result<Vec<i64>> {
        if item >= self.domain {
            return Err(invalid(format!("item {item} outside domain [0, {})", self.domain)));
        }
        Ok((0..self.rows.len()).map(|r| self.row_estimate(r, item)).collect())
    }

    /// Adds an i.i.d. draw from `noise` to every counter.
    pub fn add_noise<R: Rng + ?Sized>(mut self, noise: GeomParam, rng: &mut R) -> Result<NoisyCountSketch> {
        if !noise.is_disabled() {
            for c in &mut self.counters {
                *c = c.checked_add(noise.sample(rng)).ok_or(Error::Overflow)?;
            }
        }
        Ok(NoisyCountSketch { sketch: self, noise })
    }

    pub fn same_hashes(&self, other: &CountSketch) -> bool {
        self.width == other.width && self.domain == other.domain && self.rows == other.rows
    }

    /// Counter-wise sum of two sketches built with identical hash functions.
    pub fn merge(&self, other: &CountSketch) -> Result<CountSketch> {
        if !self.same_hashes(other) {
            return Err(Error::IncompatibleSketch(format!(
                "shape {}x{} vs {}x{} or differing hash functions",
                self.rows.len(),
                self.width,
                other.rows.len(),
                other.width
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.counters.iter_mut().zip(&other.counters) {
            *a = a.checked_add(*b).ok_or(Error::Overflow)?;
        }
        Ok(out)
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }

    pub fn hashes(&self) -> &[RowHashes] {
        &self.rows
    }

    pub fn source(&self) -> HashSource {
        self.source
    }

    /// Row-major counters.
    pub fn counters(&self) -> &[i64] {
        &self.counters
    }

    pub fn counter(&self, row: usize, col: usize) -> i64 {
        self.counters[row * self.width + col]
    }

    pub fn counter_count(&self) -> usize {
        self.counters.len()
    }

    pub(crate) fn counters_mut(&mut self) -> &mut [i64] {
        &mut self.counters
    }
}

/// A count sketch after per-counter geometric perturbation.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyCountSketch {
    sketch: CountSketch,
    noise: GeomParam,
}

impl NoisyCountSketch {
    pub fn sketch(&self) -> &CountSketch {
        &self.sketch
    }

    pub fn noise(&self) -> GeomParam {
        self.noise
    }

    pub fn estimate(&self, item: u64) -> Result<f64> {
        self.sketch.estimate(item)
    }

    pub(crate) fn estimate_unchecked(&self, item: u64) -> f64 {
        self.sketch.estimate_unchecked(item)
    }

    pub fn into_sketch(self) -> CountSketch {
        self.sketch
    }

    /// Merge for the shared-hash baseline; the result keeps this sketch's noise tag.
    pub fn merge(&self, other: &NoisyCountSketch) -> Result<NoisyCountSketch> {
        Ok(NoisyCountSketch { sketch: self.sketch.merge(&other.sketch)?, noise: self.noise })
    }
}
