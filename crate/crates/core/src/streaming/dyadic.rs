// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Dyadic blocks of epochs.
//!
//! Epochs are grouped into frames of `F` epochs (one frame of `m` epochs for
//! the full stream, one frame per tumbling window otherwise). Inside a frame,
//! block `(l, j)` covers frame-relative epochs `((j-1) 2^l, j 2^l]` and only
//! exists when it fits in the frame.

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicBlock {
    pub frame: u64,
    pub level: u32,
    /// 1-based position among level-`l` blocks of the frame.
    pub index: u64,
}

impl DyadicBlock {
    pub fn len_epochs(&self) -> u64 {
        1 << self.level
    }

    /// First absolute epoch covered (1-based).
    pub fn first_epoch(&self, frame_size: u64) -> u64 {
        self.frame * frame_size + (self.index - 1) * self.len_epochs() + 1
    }

    pub fn last_epoch(&self, frame_size: u64) -> u64 {
        self.frame * frame_size + self.index * self.len_epochs()
    }

    /// Steps covered, as the half-open range `(start, end]`.
    pub fn time_range(&self, frame_size: u64, b: u64) -> (u64, u64) {
        ((self.first_epoch(frame_size) - 1) * b, self.last_epoch(frame_size) * b)
    }
}

/// Number of block levels a frame of `frame_size` epochs needs: `floor(log2 F) + 1`.
pub fn level_count(frame_size: u64) -> u32 {
    64 - frame_size.max(1).leading_zeros()
}

/// `ceil(log2 m)`, at least 1.
pub fn ceil_log2(m: u64) -> u32 {
    if m <= 2 {
        1
    } else {
        64 - (m - 1).leading_zeros()
    }
}

/// Greedy aligned cover of frame-relative epochs `(lo, hi]` by maximal blocks.
pub fn aligned_cover(frame: u64, lo: u64, hi: u64) -> Vec<DyadicBlock> {
    let mut out = Vec::new();
    let mut at = lo;
    while at < hi {
        let mut level = if at == 0 { 63 } else { at.trailing_zeros() };
        while level > 0 && (1u64.checked_shl(level).is_none() || at + (1u64 << level) > hi) {
            level -= 1;
        }
        out.push(DyadicBlock { frame, level, index: (at >> level) + 1 });
        at += 1 << level;
    }
    out
}

/// Blocks covering absolute epochs `(lo, hi]`, split at frame boundaries.
pub fn cover_epochs(lo: u64, hi: u64, frame_size: u64) -> Vec<DyadicBlock> {
    let mut out = Vec::new();
    let mut at = lo;
    while at < hi {
        let frame = at / frame_size;
        let end = hi.min((frame + 1) * frame_size);
        out.extend(aligned_cover(frame, at - frame * frame_size, end - frame * frame_size));
        at = end;
    }
    out
}

/// Binary decomposition of the first `q` epochs of an `m`-epoch stream.
pub fn dyadic_decompose(q: u64, m: u64) -> Result<Vec<DyadicBlock>> {
    if q > m {
        return Err(invalid(format!("q = {q} exceeds m = {m}")));
    }
    Ok(aligned_cover(0, 0, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(dyadic_decompose(0, 8).unwrap().is_empty());
        let d = dyadic_decompose(5, 8).unwrap();
        assert_eq!(d, vec![DyadicBlock { frame: 0, level: 2, index: 1 }, DyadicBlock { frame: 0, level: 0, index: 5 }]);
        assert_eq!((d[0].first_epoch(8), d[0].last_epoch(8)), (1, 4));
        assert_eq!(d[1].time_range(8, 3), (12, 15));
        assert!(dyadic_decompose(9, 8).is_err());
        assert_eq!(level_count(16), 5);
        assert_eq!(level_count(15), 4);
        assert_eq!((ceil_log2(1), ceil_log2(2), ceil_log2(16), ceil_log2(17)), (1, 1, 4, 5));
    }

    #[test]
    fn suffix_cover_is_short() {
        for f in 1..=64u64 {
            for lo in 0..f {
                let blocks = aligned_cover(0, lo, f);
                assert!(blocks.len() <= 2 * level_count(f) as usize);
                assert!(blocks.iter().all(|b| b.last_epoch(f) <= f));
            }
        }
    }

    #[test]
    fn cross_frame_cover_is_exact() {
        for f in 1..=12u64 {
            for lo in 0..40 {
                for hi in lo..40 {
                    let mut covered: Vec<u64> = Vec::new();
                    for b in cover_epochs(lo, hi, f) {
                        assert!(b.last_epoch(f) <= (b.frame + 1) * f);
                        covered.extend(b.first_epoch(f)..=b.last_epoch(f));
                    }
                    assert_eq!(covered, ((lo + 1)..=hi).collect::<Vec<_>>());
                }
            }
        }
    }
}
