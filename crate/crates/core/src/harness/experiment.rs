// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment driver: data, partitioning, protocol execution, metrics, CSV.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::comm::{Comm, CommModel};
use super::data::{load_transactions, trace_steps, Dataset};
use super::metrics::{mean_report, metrics_heavy_hitters, MetricsReport};
use super::partition::{partition_uniform, to_frequency_vectors};
use super::zipf::zipf_generate;
use crate::error::{Error, Result};
use crate::freq::FrequencyVector;
use crate::hashing::{derive_seed, seeded_rng, Purpose, PUBLIC_PARTY};
use crate::oneshot::baseline::{noisycs_party_message, NoisyCsAggregator};
use crate::oneshot::basic::{basic_ledger, basic_party_message, BasicAggregator};
use crate::oneshot::freqsep::{freqsep_ledger, freqsep_party_message, light_rows, FreqSepAggregator};
use crate::oneshot::ldp::{ldp_ledger, ldp_party_message, LdpAggregator};
use crate::oneshot::{FrequencyOracle, OneShotConfig, PartyDataset};
use crate::streaming::sim::StreamRun;
use crate::streaming::{StreamConfig, StreamMode};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "FREQMDP_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    Basic,
    Ldp,
    FreqSep,
    NoisyCs,
    StreamFull,
    StreamWindow,
}

impl Protocol {
    pub const ALL: [Protocol; 6] =
        [Protocol::Basic, Protocol::Ldp, Protocol::FreqSep, Protocol::NoisyCs, Protocol::StreamFull, Protocol::StreamWindow];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Basic => "basic",
            Protocol::Ldp => "ldp",
            Protocol::FreqSep => "freqsep",
            Protocol::NoisyCs => "noisycs",
            Protocol::StreamFull => "stream-full",
            Protocol::StreamWindow => "stream-window",
        }
    }

    pub fn is_streaming(self) -> bool {
        matches!(self, Protocol::StreamFull | Protocol::StreamWindow)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown protocol {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    File(PathBuf),
    Zipf { u: u64, n: usize, skew: f64 },
}

impl FromStr for DataSource {
    type Err = Error;

    /// Parses `u,N,skew`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Config(format!("expected u,N,skew, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(DataSource::Zipf {
            u: parts[0].parse().map_err(|_| bad())?,
            n: parts[1].parse().map_err(|_| bad())?,
            skew: parts[2].parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SizeSpec {
    Fixed(f64),
    /// `ceil(3 / (phi * sqrt(k)))`.
    Auto,
}

impl FromStr for SizeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(SizeSpec::Auto);
        }
        s.parse::<f64>().map(SizeSpec::Fixed).map_err(|_| Error::Config(format!("s must be a number or \"auto\", got {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub eps: f64,
    pub beta: f64,
    pub k: usize,
    pub s: SizeSpec,
    pub phi: f64,
    /// Sliding window in steps; defaults to a tenth of the stream.
    pub window: Option<u64>,
    pub seed: u64,
    pub trials: usize,
    pub source: DataSource,
    pub rows: Option<usize>,
    pub deterministic: bool,
    pub public_randomness: bool,
    /// Query times per streaming trial, evenly spaced.
    pub probes: usize,
    /// Reporting cutoff as a fraction of `N`; defaults to `phi / 2`.
    pub report_threshold: Option<f64>,
    /// Writes `wall_ms = 0` so output depends only on config and seed.
    pub omit_timing: bool,
}

impl ExperimentConfig {
    pub fn new(protocol: Protocol, source: DataSource) -> Self {
        Self {
            protocol,
            eps: 2.0,
            beta: 0.01,
            k: 100,
            s: SizeSpec::Auto,
            phi: 0.001,
            window: None,
            seed: 0,
            trials: 5,
            source,
            rows: None,
            deterministic: false,
            public_randomness: true,
            probes: 4,
            report_threshold: None,
            omit_timing: false,
        }
    }

    /// `paper-oneshot` or `paper-stream`.
    pub fn preset(name: &str, protocol: Protocol, source: DataSource) -> Result<Self> {
        let mut c = Self::new(protocol, source);
        match name {
            "paper-oneshot" => {
                c.phi = 0.001;
                c.eps = 2.0;
                c.k = 100;
                c.rows = Some(5);
            }
            "paper-stream" => {
                c.phi = 0.005;
                c.eps = 4.0;
                c.k = 100;
                c.rows = Some(5);
            }
            other => return Err(Error::Config(format!("unknown preset {other:?}"))),
        }
        Ok(c)
    }

    pub fn resolved_s(&self) -> Result<f64> {
        match self.s {
            SizeSpec::Fixed(s) => Ok(s),
            SizeSpec::Auto => {
                if !(self.phi > 0.0) {
                    return Err(Error::Config("s = auto needs a positive phi".into()));
                }
                Ok((3.0 / (self.phi * (self.k as f64).sqrt())).ceil())
            }
        }
    }

    pub fn report_cut(&self) -> f64 {
        self.report_threshold.unwrap_or(self.phi / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return cfg(format!("epsilon must be positive, got {}", self.eps));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return cfg(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return cfg(format!("phi must lie in (0, 1), got {}", self.phi));
        }
        if self.k == 0 || self.trials == 0 {
            return cfg("k and trials must be positive".into());
        }
        if !(self.resolved_s()? >= 1.0) {
            return cfg("s must be at least 1".into());
        }
        if self.rows.is_some_and(|r| r % 2 == 0) {
            return cfg("rows must be odd".into());
        }
        if self.protocol.is_streaming() && self.probes == 0 {
            return cfg("at least one probe is required".into());
        }
        if self.window == Some(0) {
            return cfg("window must be positive".into());
        }
        if let DataSource::Zipf { u, n, skew } = self.source {
            if u < 2 || n == 0 || !(skew > 0.0) {
                return cfg(format!("zipf needs u >= 2, N >= 1, skew > 0; got {u},{n},{skew}"));
            }
        }
        Ok(())
    }

    fn load(&self) -> Result<Dataset> {
        match &self.source {
            DataSource::File(p) => load_transactions(p),
            &DataSource::Zipf { u, n, skew } => {
                let items = zipf_generate(u, n, skew, derive_seed(self.seed, PUBLIC_PARTY, Purpose::Data, 0))?;
                Ok(Dataset { items, domain: u })
            }
        }
    }
}

/// One CSV row. `trial = None` marks a mean row.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub protocol: Protocol,
    pub trial: Option<usize>,
    /// Query time for streaming, `-1` otherwise.
    pub t: i64,
    pub report: MetricsReport,
}

pub const CSV_HEADER: [&str; 10] =
    ["protocol", "trial", "t", "precision", "recall", "are_true", "are_fp", "comm_words", "comm_bits", "wall_ms"];

fn fmt_f(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x:.6}")
    }
}

pub fn write_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let m = &r.report;
        w.write_record([
            r.protocol.name().to_string(),
            r.trial.map_or_else(|| "mean".to_string(), |t| t.to_string()),
            r.t.to_string(),
            fmt_f(m.precision),
            fmt_f(m.recall),
            fmt_f(m.are_true),
            fmt_f(m.are_fp),
            m.comm_words.to_string(),
            m.comm_bits.to_string(),
            format!("{:.3}", m.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format `(series, x = comm_words, y)` points from the mean rows.
pub fn write_plot_data<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["series", "t", "x", "y"])?;
    for r in rows.iter().filter(|r| r.trial.is_none()) {
        let m = &r.report;
        for (metric, y) in [("precision", m.precision), ("recall", m.recall), ("are_true", m.are_true), ("are_fp", m.are_fp)] {
            w.write_record([format!("{}:{metric}", r.protocol), r.t.to_string(), m.comm_words.to_string(), fmt_f(y)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Worker count from the environment, if set.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Runs every trial and appends the mean row(s). Output is a pure function
/// of the config apart from `wall_ms`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    cfg.validate()?;
    let data = cfg.load()?;
    if cfg.protocol == Protocol::Ldp && data.len() != cfg.k {
        return Err(Error::Config(format!("ldp needs one item per party: N = {} but k = {}", data.len(), cfg.k)));
    }
    if data.len() < cfg.k {
        return Err(Error::Config(format!("N = {} is below k = {}", data.len(), cfg.k)));
    }
    let run = || -> Result<Vec<Vec<ExperimentRow>>> {
        (0..cfg.trials).into_par_iter().map(|trial| run_trial(cfg, &data, trial)).collect()
    };
    let per_trial = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let mut rows: Vec<ExperimentRow> = per_trial.into_iter().flatten().collect();
    let mut times: Vec<i64> = rows.iter().map(|r| r.t).collect();
    times.sort_unstable();
    times.dedup();
    for t in times {
        let at: Vec<MetricsReport> = rows.iter().filter(|r| r.t == t).map(|r| r.report).collect();
        rows.push(ExperimentRow { protocol: cfg.protocol, trial: None, t, report: mean_report(&at) });
    }
    Ok(rows)
}

fn run_trial(cfg: &ExperimentConfig, data: &Dataset, trial: usize) -> Result<Vec<ExperimentRow>> {
    let trial_seed = derive_seed(cfg.seed, PUBLIC_PARTY, Purpose::Trial, trial as u64);
    let start = Instant::now();
    let mut rows = if cfg.protocol.is_streaming() {
        run_stream_trial(cfg, data, trial_seed)?
    } else {
        vec![(-1, run_oneshot_trial(cfg, data, trial_seed)?)]
    };
    let ms = if cfg.omit_timing { 0.0 } else { start.elapsed().as_secs_f64() * 1e3 };
    Ok(rows
        .drain(..)
        .map(|(t, mut report)| {
            report.wall_ms = ms;
            ExperimentRow { protocol: cfg.protocol, trial: Some(trial), t, report }
        })
        .collect())
}

fn check_ledger(l: crate::privacy::PrivacyLedger, eps: f64, deterministic: bool) -> Result<()> {
    if deterministic {
        Ok(())
    } else {
        l.check(eps)
    }
}

fn run_oneshot_trial(cfg: &ExperimentConfig, data: &Dataset, trial_seed: u64) -> Result<MetricsReport> {
    let k = cfg.k;
    let n_total = data.len() as u64;
    let parts = if cfg.protocol == Protocol::Ldp {
        data.items.iter().map(|&x| vec![x]).collect()
    } else {
        partition_uniform(&data.items, k, derive_seed(trial_seed, PUBLIC_PARTY, Purpose::Partition, 0))?
    };
    let parties: Vec<PartyDataset> = to_frequency_vectors(&parts)
        .into_iter()
        .enumerate()
        .map(|(i, fv)| PartyDataset::new(i as u64, fv))
        .collect::<Result<_>>()?;
    let mut os = OneShotConfig::new(cfg.eps, cfg.beta, cfg.resolved_s()?, k, n_total, data.domain)?
        .with_deterministic(cfg.deterministic);
    if let Some(r) = cfg.rows {
        os = os.with_rows(r)?;
    }
    let model = CommModel::new(cfg.public_randomness, data.domain);
    let hash_seed = |i: u64| derive_seed(trial_seed, i, Purpose::Sketch, 0);
    let rng = |i: u64| seeded_rng(derive_seed(trial_seed, i, Purpose::Noise, 0));
    let mut comm = Comm::default();
    let oracle: Box<dyn FrequencyOracle + Sync> = match cfg.protocol {
        Protocol::Basic => {
            let msgs: Vec<_> = parties.par_iter().map(|p| basic_party_message(p, &os, hash_seed(p.id()), &mut rng(p.id()))).collect::<Result<_>>()?;
            let mut agg = BasicAggregator::new();
            for m in msgs {
                check_ledger(basic_ledger(&m), cfg.eps, cfg.deterministic)?;
                comm += model.sketch(&m.sketch);
                agg.ingest(m)?;
            }
            Box::new(agg)
        }
        Protocol::NoisyCs => {
            let shared = derive_seed(trial_seed, PUBLIC_PARTY, Purpose::Sketch, 0);
            let msgs: Vec<_> = parties.par_iter().map(|p| noisycs_party_message(p, &os, shared, &mut rng(p.id()))).collect::<Result<_>>()?;
            let mut agg = NoisyCsAggregator::new();
            for m in msgs {
                check_ledger(basic_ledger(&m), cfg.eps, cfg.deterministic)?;
                comm += model.sketch(&m.sketch);
                agg.ingest(m)?;
            }
            Box::new(agg)
        }
        Protocol::FreqSep => {
            check_ledger(freqsep_ledger(&os, light_rows(k, cfg.beta))?, cfg.eps, cfg.deterministic)?;
            let msgs: Vec<_> = parties.par_iter().map(|p| freqsep_party_message(p, &os, hash_seed(p.id()), &mut rng(p.id()))).collect::<Result<_>>()?;
            let mut agg = FreqSepAggregator::new(cfg.beta)?;
            for m in msgs {
                comm += model.freqsep(&m);
                agg.ingest(m)?;
            }
            Box::new(agg)
        }
        Protocol::Ldp => {
            check_ledger(ldp_ledger(cfg.eps, cfg.deterministic)?, cfg.eps, cfg.deterministic)?;
            let msgs: Vec<_> = parties
                .par_iter()
                .map(|p| ldp_party_message(p, cfg.eps, data.domain, hash_seed(p.id()), cfg.deterministic, &mut rng(p.id())))
                .collect::<Result<_>>()?;
            let mut agg = LdpAggregator::new(cfg.eps, data.domain)?;
            for m in msgs {
                comm += model.ldp(&m);
                agg.ingest(m)?;
            }
            Box::new(agg)
        }
        Protocol::StreamFull | Protocol::StreamWindow => unreachable!("streaming handled separately"),
    };
    let estimates: Vec<f64> = (0..data.domain).into_par_iter().map(|j| oracle.estimate(j)).collect::<Result<_>>()?;
    let truth = FrequencyVector::from_items(data.items.iter().copied());
    let mut r = metrics_heavy_hitters(&truth, &estimates, cfg.phi, n_total, cfg.report_cut())?;
    r.comm_words = comm.words;
    r.comm_bits = comm.bits;
    Ok(r)
}

/// Evenly spaced times in `[1, n]`, ending at `n`.
pub fn probe_times(n: u64, probes: usize) -> Vec<u64> {
    let p = probes.max(1) as u64;
    let mut v: Vec<u64> = (1..=p).map(|j| (j * n).div_ceil(p).max(1)).collect();
    v.dedup();
    v
}

fn run_stream_trial(cfg: &ExperimentConfig, data: &Dataset, trial_seed: u64) -> Result<Vec<(i64, MetricsReport)>> {
    let k = cfg.k;
    let steps = trace_steps(&data.items, k);
    let n = steps.len() as u64;
    let s = cfg.resolved_s()?.ceil() as u64;
    let mode = match cfg.protocol {
        Protocol::StreamWindow => StreamMode::Sliding { w: cfg.window.unwrap_or_else(|| n.div_ceil(10)).max(1) },
        _ => StreamMode::Full,
    };
    let sc = StreamConfig::new(n, s, k as u64, cfg.eps, cfg.beta, data.domain, mode)
        .with_rows(cfg.rows)
        .with_deterministic(cfg.deterministic)
        .with_master_seed(derive_seed(trial_seed, PUBLIC_PARTY, Purpose::Block, 0));
    let mut run = StreamRun::new(sc, derive_seed(trial_seed, PUBLIC_PARTY, Purpose::Noise, 0))?;
    check_ledger(run.setup().ledger(), cfg.eps, cfg.deterministic)?;
    let dim = run.setup().intra.as_ref().map_or(1, |c| c.dim());
    let window = run.setup().window;
    let model = CommModel::new(cfg.public_randomness, data.domain);
    let mut comm = Comm::default();
    let mut out = Vec::new();
    let probes = probe_times(n, cfg.probes);
    for (idx, step) in steps.iter().enumerate() {
        let t = idx as u64 + 1;
        run.step_with(step, |m| {
            comm += model.stream(m, dim);
        })?;
        if probes.binary_search(&t).is_err() {
            continue;
        }
        let lo = window.map_or(0, |w| t.saturating_sub(w)) as usize;
        let truth = FrequencyVector::from_items(steps[lo..t as usize].iter().flat_map(|s| s.iter().copied()));
        let agg = run.aggregator();
        let estimates: Vec<f64> = (0..data.domain).into_par_iter().map(|j| agg.estimate(j)).collect::<Result<_>>()?;
        let mut r = metrics_heavy_hitters(&truth, &estimates, cfg.phi, truth.total(), cfg.report_cut())?;
        r.comm_words = comm.words;
        r.comm_bits = comm.bits;
        out.push((t as i64, r));
    }
    Ok(out)
}
