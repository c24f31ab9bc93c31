// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Transaction files: one transaction per line, whitespace-separated
//! nonnegative item ids. Streaming traces use the same format and are read
//! step-major: item `(t-1)*k + i` is party `i`'s item at step `t`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub items: Vec<u64>,
    /// `max id + 1`.
    pub domain: u64,
}

impl Dataset {
    pub fn from_items(items: Vec<u64>) -> Result<Self> {
        let domain = items.iter().max().map(|m| m + 1).ok_or_else(|| Error::Data { line: 0, msg: "dataset is empty".into() })?;
        Ok(Self { items, domain })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

pub fn load_transactions(path: &Path) -> Result<Dataset> {
    let reader = BufReader::new(File::open(path)?);
    let mut items = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        for tok in line.split_whitespace() {
            let v = tok.parse::<u64>().map_err(|e| Error::Data { line: i + 1, msg: format!("bad item {tok:?}: {e}") })?;
            items.push(v);
        }
    }
    if items.is_empty() {
        return Err(Error::Data { line: 0, msg: format!("{} holds no items", path.display()) });
    }
    Dataset::from_items(items)
}

/// Writes `per_line` items per line.
pub fn write_transactions(path: &Path, items: &[u64], per_line: usize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for chunk in items.chunks(per_line.max(1)) {
        let line: Vec<String> = chunk.iter().map(u64::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

/// Splits a flattened trace into steps of `k` items; a partial last step is dropped.
pub fn trace_steps(items: &[u64], k: usize) -> Vec<&[u64]> {
    items.chunks_exact(k.max(1)).collect()
}
