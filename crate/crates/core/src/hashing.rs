// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded pairwise-independent hash families and public randomness.
//!
//! Every sketch row carries a bucket hash `h(x) = ((a·x + b) mod p) mod s` and a
//! sign hash built from the same family with two buckets. Hash functions are
//! never transmitted: parties and the aggregator re-derive them from seeds that
//! are a pure function of a master seed and a `(party, purpose, counter)` tuple.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// Precomputed primes used as moduli: 2^31+11, 2^32+15, 2^40+15, 2^48+21,
/// 2^61-1 and 2^64-59.
pub const MODULI: [u64; 6] = [
    2_147_483_659,
    4_294_967_311,
    1_099_511_627_791,
    281_474_976_710_677,
    2_305_843_009_213_693_951,
    18_446_744_073_709_551_557,
];

/// Smallest precomputed modulus that is at least `max(domain, 2^31)`.
pub fn modulus_for(domain: u64) -> u64 {
    MODULI
        .iter()
        .copied()
        .find(|&p| p >= domain)
        .unwrap_or(MODULI[MODULI.len() - 1])
}

/// `h(x) = ((a·x + b) mod p) mod range` over the domain `[0, domain)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PairwiseHash {
    a: u64,
    b: u64,
    p: u64,
    range: u64,
    domain: u64,
}

impl PairwiseHash {
    /// Draws `(a, b)` from a generator seeded with `seed`.
    pub fn draw(seed: u64, domain: u64, range: u64) -> Result<Self> {
        if domain == 0 || range == 0 {
            return Err(invalid("hash domain and range must be positive"));
        }
        let p = modulus_for(domain);
        let mut rng = seeded_rng(seed);
        let a = rng.random_range(1..p);
        let b = rng.random_range(0..p);
        Ok(Self { a, b, p, range, domain })
    }

    /// Builds a hash from explicit coefficients, validating every invariant.
    pub fn from_parts(a: u64, b: u64, p: u64, range: u64, domain: u64) -> Result<Self> {
        if domain == 0 || range == 0 {
            return Err(invalid("hash domain and range must be positive"));
        }
        if !is_prime(p) {
            return Err(invalid(format!("modulus {p} is not prime")));
        }
        if p < domain {
            return Err(invalid(format!("modulus {p} smaller than domain {domain}")));
        }
        if a == 0 || a >= p || b >= p {
            return Err(invalid("coefficients must satisfy 1 <= a < p and 0 <= b < p"));
        }
        Ok(Self { a, b, p, range, domain })
    }

    /// `h(x) = x`; requires `range >= domain`. Used for collision-free fixtures.
    pub fn identity(domain: u64, range: u64) -> Result<Self> {
        if range < domain {
            return Err(invalid("identity hash needs range >= domain"));
        }
        Self::from_parts(1, 0, modulus_for(domain), range, domain)
    }

    pub fn eval(&self, x: u64) -> Result<u64> {
        if x >= self.domain {
            return Err(invalid(format!("item {x} outside domain [0, {})", self.domain)));
        }
        Ok(self.bucket(x))
    }

    #[inline]
    pub(crate) fn bucket(&self, x: u64) -> u64 {
        debug_assert!(x < self.domain);
        let v = (u128::from(self.a) * u128::from(x) + u128::from(self.b)) % u128::from(self.p);
        (v as u64) % self.range
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }
}

/// Two-bucket pairwise hash mapped to `{-1, +1}` (bucket 0 is `-1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignHash {
    inner: PairwiseHash,
}

impl SignHash {
    pub fn draw(seed: u64, domain: u64) -> Result<Self> {
        Ok(Self { inner: PairwiseHash::draw(seed, domain, 2)? })
    }

    pub fn from_inner(inner: PairwiseHash) -> Result<Self> {
        if inner.range != 2 {
            return Err(invalid("sign hash needs a two-bucket inner hash"));
        }
        Ok(Self { inner })
    }

    pub fn eval(&self, x: u64) -> Result<i64> {
        self.inner.eval(x).map(bucket_to_sign)
    }

    #[inline]
    pub(crate) fn sign(&self, x: u64) -> i64 {
        bucket_to_sign(self.inner.bucket(x))
    }

    pub fn inner(&self) -> &PairwiseHash {
        &self.inner
    }
}

#[inline]
fn bucket_to_sign(bucket: u64) -> i64 {
    if bucket == 0 {
        -1
    } else {
        1
    }
}

/// What a derived seed is used for. Distinct purposes never share a stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Purpose {
    BucketHash = 1,
    SignHash = 2,
    Sketch = 3,
    Noise = 4,
    Sampling = 5,
    Split = 6,
    Heavy = 7,
    LightSize = 8,
    Block = 9,
    Hrr = 10,
    Partition = 11,
    Data = 12,
    Trial = 13,
}

/// Party id reserved for randomness that belongs to no party.
pub const PUBLIC_PARTY: u64 = u64::MAX;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Pure seed derivation from `(master, party, purpose, counter)`.
pub fn derive_seed(master: u64, party: u64, purpose: Purpose, counter: u64) -> u64 {
    let mut h = splitmix(master);
    h = splitmix(h ^ party);
    h = splitmix(h ^ purpose as u64);
    splitmix(h ^ counter)
}

/// Sub-seed for an indexed component (e.g. row `r` of a sketch) of a seed.
pub fn subseed(seed: u64, index: u64) -> u64 {
    splitmix(splitmix(seed) ^ index)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub party: u64,
    pub purpose: Purpose,
    pub counter: u64,
    pub seed: u64,
}

/// Audit log of public-randomness derivations.
#[derive(Clone, Debug, Default)]
pub struct RandomnessLedger {
    master: u64,
    records: Vec<Derivation>,
}

impl RandomnessLedger {
    pub fn new(master: u64) -> Self {
        Self { master, records: Vec::new() }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn derive_seed(&mut self, party: u64, purpose: Purpose, counter: u64) -> u64 {
        let seed = derive_seed(self.master, party, purpose, counter);
        self.records.push(Derivation { party, purpose, counter, seed });
        seed
    }

    pub fn derivations(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> &[Derivation] {
        &self.records
    }

    /// Each derivation stands for one 64-bit seed of shared randomness.
    pub fn public_bits(&self) -> u64 {
        64 * self.records.len() as u64
    }
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &BASES {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let mul = |x: u64, y: u64| ((u128::from(x) * u128::from(y)) % u128::from(n)) as u64;
    let pow = |mut base: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &BASES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
