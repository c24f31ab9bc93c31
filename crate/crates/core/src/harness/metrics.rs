// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Heavy-hitter metrics.

use crate::error::{invalid, Result};
use crate::freq::FrequencyVector;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    /// Mean relative error over true heavy hitters.
    pub are_true: f64,
    /// Mean relative error over false positives; infinite when one has true frequency 0.
    pub are_fp: f64,
    pub comm_words: u64,
    pub comm_bits: u64,
    pub wall_ms: f64,
    /// Set when there were no true heavy hitters (recall reported as 1).
    pub recall_undefined: bool,
    pub reported: usize,
    pub true_heavy: usize,
}

/// Compares `estimates[j]` (one per item of the domain) with the truth.
/// Heavy hitters have `truth > phi * total`; reported items have
/// `estimate >= report_threshold * total`.
pub fn metrics_heavy_hitters(
    truth: &FrequencyVector,
    estimates: &[f64],
    phi: f64,
    total: u64,
    report_threshold: f64,
) -> Result<MetricsReport> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(invalid(format!("phi must lie in (0, 1), got {phi}")));
    }
    if truth.max_item().is_some_and(|m| m as usize >= estimates.len()) {
        return Err(invalid("estimates do not cover the data domain"));
    }
    let heavy_cut = phi * total as f64;
    let report_cut = report_threshold * total as f64;
    let mut r = MetricsReport::default();
    let (mut hits, mut err_true, mut err_fp, mut fps) = (0usize, 0.0, 0.0, 0usize);
    for (j, &est) in estimates.iter().enumerate() {
        let x = truth.get(j as u64) as f64;
        let is_heavy = x > heavy_cut;
        let reported = est >= report_cut;
        if is_heavy {
            r.true_heavy += 1;
            err_true += (est - x).abs() / x;
        }
        if reported {
            r.reported += 1;
            if is_heavy {
                hits += 1;
            } else {
                fps += 1;
                err_fp += if x == 0.0 { f64::INFINITY } else { (est - x).abs() / x };
            }
        }
    }
    r.precision = if r.reported == 0 { 1.0 } else { hits as f64 / r.reported as f64 };
    if r.true_heavy == 0 {
        r.recall = 1.0;
        r.recall_undefined = true;
    } else {
        r.recall = hits as f64 / r.true_heavy as f64;
        r.are_true = err_true / r.true_heavy as f64;
    }
    r.are_fp = if fps == 0 { 0.0 } else { err_fp / fps as f64 };
    Ok(r)
}

/// Component-wise mean; an infinite `are_fp` stays infinite.
pub fn mean_report(rows: &[MetricsReport]) -> MetricsReport {
    let n = rows.len().max(1) as f64;
    let mean = |f: fn(&MetricsReport) -> f64| rows.iter().map(f).sum::<f64>() / n;
    MetricsReport {
        precision: mean(|r| r.precision),
        recall: mean(|r| r.recall),
        are_true: mean(|r| r.are_true),
        are_fp: mean(|r| r.are_fp),
        comm_words: (rows.iter().map(|r| r.comm_words as f64).sum::<f64>() / n).round() as u64,
        comm_bits: (rows.iter().map(|r| r.comm_bits as f64).sum::<f64>() / n).round() as u64,
        wall_ms: mean(|r| r.wall_ms),
        recall_undefined: rows.iter().any(|r| r.recall_undefined),
        reported: (rows.iter().map(|r| r.reported).sum::<usize>() as f64 / n).round() as usize,
        true_heavy: (rows.iter().map(|r| r.true_heavy).sum::<usize>() as f64 / n).round() as usize,
    }
}
