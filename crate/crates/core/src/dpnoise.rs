// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Symmetric geometric noise, randomized response and the binomial sampler.
//!
//! Samplers are stateless: callers own their generators, one stream per party
//! and purpose, so parties can run concurrently without sharing state.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{invalid, Result};

/// Two-sided geometric distribution `Geom(alpha)` with pmf
/// `(alpha-1)/(alpha+1) * alpha^-|l|`, calibrated as `alpha = exp(eps / sensitivity)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeomParam {
    epsilon: f64,
    sensitivity: f64,
    alpha: f64,
    disabled: bool,
}

impl GeomParam {
    pub fn new(epsilon: f64, sensitivity: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !(sensitivity > 0.0) {
            return Err(invalid("geometric noise needs epsilon > 0 and sensitivity > 0"));
        }
        let alpha = (epsilon / sensitivity).exp();
        if !(alpha > 1.0) {
            return Err(invalid(format!("alpha = exp({epsilon}/{sensitivity}) rounds to 1")));
        }
        Ok(Self { epsilon, sensitivity, alpha, disabled: false })
    }

    /// Direct parameterisation with unit sensitivity.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(invalid(format!("alpha must be finite and > 1, got {alpha}")));
        }
        Ok(Self { epsilon: alpha.ln(), sensitivity: 1.0, alpha, disabled: false })
    }

    /// Noise switched off; only for deterministic tests of downstream code.
    pub fn disabled() -> Self {
        Self { epsilon: f64::INFINITY, sensitivity: 1.0, alpha: f64::INFINITY, disabled: true }
    }

    /// Same calibration, but with the noise switched off when `disabled` is set.
    pub fn with_disabled(self, disabled: bool) -> Self {
        if disabled {
            Self { disabled: true, ..self }
        } else {
            self
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    pub fn is_disabled(&self) -> bool {
        self.disabled
    }

    pub fn pmf(&self, l: i64) -> Result<f64> {
        if self.disabled || !(self.alpha > 1.0) {
            return Err(invalid("pmf undefined without a finite alpha > 1"));
        }
        let a = self.alpha;
        Ok((a - 1.0) / (a + 1.0) * (-(l.unsigned_abs() as f64) * a.ln()).exp())
    }

    /// `2 alpha / (alpha - 1)^2`; zero when disabled.
    pub fn variance(&self) -> f64 {
        if self.disabled {
            return 0.0;
        }
        2.0 * self.alpha / (self.alpha - 1.0).powi(2)
    }

    /// `pmf(l) / pmf(l - shift)`, the privacy loss at output `l`.
    pub fn mechanism_ratio(&self, shift: i64, l: i64) -> f64 {
        if self.disabled {
            return if shift == 0 { 1.0 } else { f64::INFINITY };
        }
        let exponent = l.unsigned_abs() as f64 - (l - shift).unsigned_abs() as f64;
        (-exponent * self.alpha.ln()).exp()
    }

    /// Inverse-CDF draw: zero with probability `(alpha-1)/(alpha+1)`, otherwise
    /// a uniform sign times `1 + floor(ln U / -ln alpha)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        if self.disabled {
            return 0;
        }
        let a = self.alpha;
        let p_zero = (a - 1.0) / (a + 1.0);
        if unit_open0(rng.random::<u64>()) <= p_zero {
            return 0;
        }
        let negative = rng.random::<bool>();
        let u = unit_open0(rng.random::<u64>());
        let tail = (u.ln() / -a.ln()).floor();
        let magnitude = if tail >= (i64::MAX - 1) as f64 { i64::MAX - 1 } else { tail as i64 + 1 };
        if negative {
            -magnitude
        } else {
            magnitude
        }
    }
}

/// Maps a 64-bit word to `(0, 1]` on a 2^-53 grid.
#[inline]
fn unit_open0(word: u64) -> f64 {
    ((word >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Randomized response keeping a `{-1,+1}` bit with probability `e^eps/(e^eps+1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RrParam {
    epsilon: f64,
    keep_prob: f64,
    disabled: bool,
}

impl RrParam {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(invalid("randomized response needs epsilon > 0"));
        }
        Ok(Self { epsilon, keep_prob: 1.0 / (1.0 + (-epsilon).exp()), disabled: false })
    }

    pub fn disabled() -> Self {
        Self { epsilon: f64::INFINITY, keep_prob: 1.0, disabled: true }
    }

    pub fn with_disabled(self, disabled: bool) -> Self {
        if disabled {
            Self::disabled()
        } else {
            self
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn keep_prob(&self) -> f64 {
        self.keep_prob
    }

    pub fn is_disabled(&self) -> bool {
        self.disabled
    }

    /// `(e^eps + 1)/(e^eps - 1)`, which undoes the shrinkage of the expected bit.
    pub fn debias(&self) -> f64 {
        if self.disabled {
            1.0
        } else {
            1.0 / (2.0 * self.keep_prob - 1.0)
        }
    }

    pub fn flip<R: Rng + ?Sized>(&self, bit: i64, rng: &mut R) -> i64 {
        debug_assert!(bit == 1 || bit == -1);
        if self.disabled || rng.random_bool(self.keep_prob) {
            bit
        } else {
            -bit
        }
    }
}

/// Exact `Binomial(n, prob)` draw.
pub fn binomial_sample<R: Rng + ?Sized>(n: u64, prob: f64, rng: &mut R) -> Result<u64> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(invalid(format!("binomial probability {prob} outside [0, 1]")));
    }
    if n == 0 || prob == 0.0 {
        return Ok(0);
    }
    if prob == 1.0 {
        return Ok(n);
    }
    let dist = Binomial::new(n, prob).map_err(|e| invalid(e.to_string()))?;
    Ok(dist.sample(rng))
}
