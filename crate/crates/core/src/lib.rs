// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Multiparty differentially private frequency estimation.
//!
//! `k` parties each hold a multiset of items from `[0, u)` and send one
//! message (or a stream of messages) to an aggregator, which estimates the
//! global frequency of any item.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod bitcode;
pub mod dpnoise;
pub mod error;
pub mod freq;
pub mod harness;
pub mod hashing;
pub mod oneshot;
pub mod privacy;
pub mod sketch;
pub mod streaming;

pub use error::{Error, Result};
pub use freq::FrequencyVector;
