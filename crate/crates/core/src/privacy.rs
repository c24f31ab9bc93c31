// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Per-party epsilon ledger.
//!
//! Sequential charges add up. A parallel group (mechanisms applied to
//! disjoint parts of the data) costs the most expensive of its branches.

use std::fmt;

use crate::dpnoise::{GeomParam, RrParam};
use crate::error::{Error, Result};

/// Relative slack for floating-point composition.
const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum LedgerEntry {
    Charge { label: String, epsilon: f64 },
    Parallel { label: String, branches: Vec<PrivacyLedger> },
}

impl LedgerEntry {
    pub fn cost(&self) -> f64 {
        match self {
            LedgerEntry::Charge { epsilon, .. } => *epsilon,
            LedgerEntry::Parallel { branches, .. } => branches.iter().map(PrivacyLedger::total).fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PrivacyLedger {
    entries: Vec<LedgerEntry>,
}

impl PrivacyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, label: impl Into<String>, epsilon: f64) -> &mut Self {
        self.entries.push(LedgerEntry::Charge { label: label.into(), epsilon });
        self
    }

    /// Geometric noise on a query of the given L1 sensitivity costs
    /// `sensitivity * ln(alpha)`; infinite when the noise is disabled.
    pub fn charge_geom(&mut self, label: impl Into<String>, noise: GeomParam, query_sensitivity: f64) -> &mut Self {
        let eps = if noise.is_disabled() { f64::INFINITY } else { query_sensitivity * noise.alpha().ln() };
        self.charge(label, eps)
    }

    pub fn charge_rr(&mut self, label: impl Into<String>, rr: RrParam) -> &mut Self {
        let eps = if rr.is_disabled() { f64::INFINITY } else { rr.epsilon() };
        self.charge(label, eps)
    }

    pub fn parallel(&mut self, label: impl Into<String>, branches: Vec<PrivacyLedger>) -> &mut Self {
        self.entries.push(LedgerEntry::Parallel { label: label.into(), branches });
        self
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(LedgerEntry::cost).sum()
    }

    pub fn within(&self, budget: f64) -> bool {
        self.total() <= budget * (1.0 + TOLERANCE)
    }

    pub fn check(&self, budget: f64) -> Result<()> {
        if self.within(budget) {
            Ok(())
        } else {
            Err(Error::ProtocolViolation(format!("privacy ledger total {} exceeds budget {budget}", self.total())))
        }
    }
}

impl fmt::Display for PrivacyLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write(l: &PrivacyLedger, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
            for e in &l.entries {
                match e {
                    LedgerEntry::Charge { label, epsilon } => {
                        writeln!(f, "{:indent$}{label}: {epsilon:.6}", "", indent = 2 * depth)?
                    }
                    LedgerEntry::Parallel { label, branches } => {
                        writeln!(f, "{:indent$}{label} (parallel): {:.6}", "", e.cost(), indent = 2 * depth)?;
                        for b in branches {
                            write(b, f, depth + 1)?;
                        }
                    }
                }
            }
            Ok(())
        }
        write(self, f, 0)?;
        write!(f, "total: {:.6}", self.total())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_parallel_composition() {
        let mut heavy = PrivacyLedger::new();
        heavy.charge("rep", 0.25).charge("rep", 0.25);
        let mut light = PrivacyLedger::new();
        light.charge("size", 0.25).charge("sketch", 0.25);
        let mut l = PrivacyLedger::new();
        l.charge("split", 0.5).parallel("disjoint", vec![heavy, light]);
        assert!((l.total() - 1.0).abs() < 1e-15);
        assert!(l.check(1.0).is_ok());
        assert!(l.check(0.99).is_err());
        assert!(l.to_string().contains("parallel"));
    }

    #[test]
    fn geom_charge_uses_alpha() {
        let mut l = PrivacyLedger::new();
        l.charge_geom("sketch", GeomParam::new(2.0, 10.0).unwrap(), 10.0);
        assert!((l.total() - 2.0).abs() < 1e-12);
        l.charge_geom("off", GeomParam::disabled(), 1.0);
        assert!(l.total().is_infinite());
    }
}
