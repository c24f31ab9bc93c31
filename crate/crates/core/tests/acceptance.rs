// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria. Each test prints one `criterion N ...: PASS|FAIL`
//! line with the measured values, then asserts the criterion.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freqmdp::dpnoise::GeomParam;
use freqmdp::harness::{partition_uniform, zipf_generate};
use freqmdp::hashing::{derive_seed, seeded_rng, Purpose};
use freqmdp::oneshot::baseline::{noisycs_party_message, NoisyCsAggregator};
use freqmdp::oneshot::basic::{basic_ledger, basic_party_message, BasicAggregator};
use freqmdp::oneshot::freqsep::{freqsep_ledger, freqsep_party_message, light_rows, FreqSepAggregator};
use freqmdp::oneshot::ldp::{ldp_ledger, ldp_party_message, ldp_width, LdpAggregator};
use freqmdp::oneshot::{FrequencyOracle, OneShotConfig, PartyDataset};
use freqmdp::streaming::sim::StreamRun;
use freqmdp::streaming::{dyadic_decompose, single_stream_mode, StreamConfig, StreamMode, StreamSetup};
use freqmdp::FrequencyVector;

fn report(n: u32, name: &str, pass: bool, detail: String, start: Instant) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    // direct write so the line shows for passing tests too
    let line = format!("criterion {n} {name}: {verdict} ({detail}; {:.1}s)\n", start.elapsed().as_secs_f64());
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

#[test]
fn criterion_01_geometric_fidelity() {
    let start = Instant::now();
    let samples = 1_000_000usize;
    let mut pass = true;
    let mut worst_pmf = 0.0f64;
    let mut tail_violations = 0;
    let mut ratio_violations = 0;
    for (idx, alpha) in [1.5, std::f64::consts::E, std::f64::consts::E.powi(2)].into_iter().enumerate() {
        let g = GeomParam::from_alpha(alpha).unwrap();
        let mut rng = seeded_rng(100 + idx as u64);
        let mut counts = [0u64; 7];
        let mut beyond = [0u64; 11];
        for _ in 0..samples {
            let x = g.sample(&mut rng);
            if x.abs() <= 3 {
                counts[(x + 3) as usize] += 1;
            }
            for (d, b) in beyond.iter_mut().enumerate() {
                if x.unsigned_abs() > d as u64 {
                    *b += 1;
                }
            }
        }
        for l in -3i64..=3 {
            let exact = g.pmf(l).unwrap();
            let emp = counts[(l + 3) as usize] as f64 / samples as f64;
            let rel = (emp - exact).abs() / exact;
            worst_pmf = worst_pmf.max(rel);
            if rel > 0.01 {
                pass = false;
            }
        }
        for (d, &b) in beyond.iter().enumerate() {
            if b as f64 / samples as f64 > alpha.powi(-(d as i32)) {
                tail_violations += 1;
            }
        }
        let eps = alpha.ln();
        for l in -200i64..=200 {
            let r = g.pmf(l).unwrap() / g.pmf(l + 1).unwrap();
            if r > eps.exp() * (1.0 + 1e-12) || 1.0 / r > eps.exp() * (1.0 + 1e-12) {
                ratio_violations += 1;
            }
        }
    }
    pass &= tail_violations == 0 && ratio_violations == 0;
    let detail = format!(
        "worst pmf relative error {:.4} vs 0.01, tail violations {tail_violations}, ratio violations {ratio_violations}",
        worst_pmf
    );
    report(1, "geometric mechanism fidelity", pass, detail, start);
    assert!(pass);
}

/// |z| of the sample mean against the truth; `0` when both match exactly.
fn z_score(xs: &[f64], truth: f64) -> f64 {
    let (m, sd) = mean_sd(xs);
    if sd == 0.0 {
        return if m == truth { 0.0 } else { f64::INFINITY };
    }
    (m - truth).abs() / (sd / (xs.len() as f64).sqrt())
}

#[test]
fn criterion_02_unbiasedness() {
    let start = Instant::now();
    let runs = 10_000u64;
    let u = 16u64;
    let items = [0u64, 5, 15];
    let mut worst = (0.0f64, String::new());
    let mut note = |label: &str, item: u64, xs: &[f64], truth: f64| {
        let z = z_score(xs, truth);
        if z > worst.0 || worst.1.is_empty() {
            worst = (z, format!("{label} item {item}"));
        }
    };

    // four parties over u = 16; item 0 is heavy everywhere, 15 is absent
    let fixture: Vec<FrequencyVector> = (0..4u64)
        .map(|i| FrequencyVector::from_counts([(0, 30 + i), (5, 3 + i), (1 + i, 4), (9, 2 * i)].into_iter().filter(|&(_, c)| c > 0)))
        .collect();
    let mut truth = FrequencyVector::new();
    for f in &fixture {
        truth.merge(f);
    }
    let n_total = truth.total();
    let parties: Vec<PartyDataset> = fixture.iter().enumerate().map(|(i, f)| PartyDataset::new(i as u64, f.clone()).unwrap()).collect();

    // basic
    let cfg = OneShotConfig::new(2.0, 0.01, 4.0, 4, n_total, u).unwrap();
    let mut est = vec![Vec::new(); items.len()];
    for r in 0..runs {
        let mut agg = BasicAggregator::new();
        for p in &parties {
            let seed = derive_seed(r, p.id(), Purpose::Sketch, 0);
            let mut rng = seeded_rng(derive_seed(r, p.id(), Purpose::Noise, 0));
            agg.ingest(basic_party_message(p, &cfg, seed, &mut rng).unwrap()).unwrap();
        }
        for (e, &j) in est.iter_mut().zip(&items) {
            e.push(agg.estimate(j).unwrap());
        }
    }
    for (e, &j) in est.iter().zip(&items) {
        note("basic", j, e, truth.get(j) as f64);
    }

    // frequency separation with ks >= N, so every heavy entry is kept
    let cfg = OneShotConfig::new(2.0, 0.01, 64.0, 4, n_total, u).unwrap();
    let mut est = vec![Vec::new(); items.len()];
    for r in 0..runs {
        let mut agg = FreqSepAggregator::new(cfg.beta).unwrap();
        for p in &parties {
            let seed = derive_seed(r, p.id(), Purpose::Sketch, 1);
            let mut rng = seeded_rng(derive_seed(r, p.id(), Purpose::Noise, 1));
            agg.ingest(freqsep_party_message(p, &cfg, seed, &mut rng).unwrap()).unwrap();
        }
        for (e, &j) in est.iter_mut().zip(&items) {
            e.push(agg.estimate(j).unwrap());
        }
    }
    for (e, &j) in est.iter().zip(&items) {
        note("freqsep", j, e, truth.get(j) as f64);
    }

    // LDP: 40 parties with one item each
    let ldp_items: Vec<u64> = (0..40u64).map(|i| if i % 3 == 0 { 0 } else { (i * i) % 15 }).collect();
    let ldp_truth = FrequencyVector::from_items(ldp_items.iter().copied());
    let ldp_parties: Vec<PartyDataset> =
        ldp_items.iter().enumerate().map(|(i, &x)| PartyDataset::new(i as u64, FrequencyVector::from_items([x])).unwrap()).collect();
    let mut est = vec![Vec::new(); items.len()];
    for r in 0..runs {
        let mut agg = LdpAggregator::new(2.0, u).unwrap();
        for p in &ldp_parties {
            let seed = derive_seed(r, p.id(), Purpose::Sketch, 2);
            let mut rng = seeded_rng(derive_seed(r, p.id(), Purpose::Noise, 2));
            agg.ingest(ldp_party_message(p, 2.0, u, seed, false, &mut rng).unwrap()).unwrap();
        }
        for (e, &j) in est.iter_mut().zip(&items) {
            e.push(agg.estimate(j).unwrap());
        }
    }
    for (e, &j) in est.iter().zip(&items) {
        note("ldp", j, e, ldp_truth.get(j) as f64);
    }

    // streaming: 4 parties, n = 32, s = 4 (b = 8); queried mid-epoch at t = 29
    let trace = |t: u64, i: u64| -> u64 {
        if (t + i) % 3 == 0 {
            0
        } else {
            (t * 7 + i * 3) % u
        }
    };
    let t_query = 29u64;
    for (label, mode) in [("stream-full", StreamMode::Full), ("stream-window", StreamMode::Sliding { w: 16 })] {
        let lo = match mode {
            StreamMode::Full => 0,
            StreamMode::Sliding { w } => t_query - w,
        };
        let mut st_truth = FrequencyVector::new();
        for t in lo + 1..=t_query {
            for i in 0..4 {
                st_truth.add(trace(t, i), 1);
            }
        }
        let mut est = vec![Vec::new(); items.len()];
        for r in 0..runs {
            let cfg = StreamConfig::new(32, 4, 4, 2.0, 0.01, u, mode).with_master_seed(derive_seed(r, 0, Purpose::Block, 3));
            let mut run = StreamRun::new(cfg, derive_seed(r, 0, Purpose::Noise, 3)).unwrap();
            for t in 1..=t_query {
                let step: Vec<u64> = (0..4).map(|i| trace(t, i)).collect();
                run.step(&step).unwrap();
            }
            for (e, &j) in est.iter_mut().zip(&items) {
                e.push(run.aggregator().estimate(j).unwrap());
            }
        }
        for (e, &j) in est.iter().zip(&items) {
            note(label, j, e, st_truth.get(j) as f64);
        }
    }

    let pass = worst.0 <= 4.0;
    report(2, "unbiasedness", pass, format!("{runs} runs per estimator, worst |z| {:.2} at {} vs 4", worst.0, worst.1), start);
    assert!(pass);
}

fn ldp_variance(k: u64, eps: f64, trials: u64) -> f64 {
    let u = 100u64;
    let items: Vec<u64> = (0..k).map(|i| if i % 10 == 0 { 0 } else { 1 + i % (u - 1) }).collect();
    let truth = items.iter().filter(|&&x| x == 0).count() as f64;
    let parties: Vec<PartyDataset> =
        items.iter().enumerate().map(|(i, &x)| PartyDataset::new(i as u64, FrequencyVector::from_items([x])).unwrap()).collect();
    let errs: Vec<f64> = (0..trials)
        .map(|r| {
            let mut agg = LdpAggregator::new(eps, u).unwrap();
            for p in &parties {
                let seed = derive_seed(r, p.id(), Purpose::Sketch, eps.to_bits());
                let mut rng = seeded_rng(derive_seed(r, p.id(), Purpose::Noise, eps.to_bits()));
                agg.ingest(ldp_party_message(p, eps, u, seed, false, &mut rng).unwrap()).unwrap();
            }
            agg.estimate(0).unwrap() - truth
        })
        .collect();
    let (_, sd) = mean_sd(&errs);
    sd * sd
}

#[test]
fn criterion_03_ldp_variance() {
    let start = Instant::now();
    let k = 20_000u64;
    let mut pass = true;
    let mut parts = Vec::new();
    let mut prev = f64::INFINITY;
    for eps in [1.0, 2.0, 4.0] {
        let var = ldp_variance(k, eps, 200);
        let a = (eps / 2.0f64).exp();
        let bound = 8.0 * k as f64 * a / (a - 1.0).powi(2);
        pass &= var <= bound && var < prev;
        prev = var;
        parts.push(format!("eps {eps}: var {var:.0} <= {bound:.0}"));
    }
    report(3, "LDP variance", pass, parts.join(", "), start);
    assert!(pass);
}

#[test]
fn criterion_04_ldp_communication() {
    let start = Instant::now();
    let u = 1000u64;
    let k = 100_000u64;
    let mut pass = true;
    let mut means = Vec::new();
    let mut nonzero_at_4 = 0.0;
    for eps in [1.0f64, 2.0, 4.0, 8.0] {
        let mut bits = 0u64;
        let mut entries = 0u64;
        for i in 0..k {
            let p = PartyDataset::new(i, FrequencyVector::from_items([i % u])).unwrap();
            let mut rng = seeded_rng(derive_seed(7, i, Purpose::Noise, eps.to_bits()));
            let m = ldp_party_message(&p, eps, u, derive_seed(7, i, Purpose::Sketch, 0), false, &mut rng).unwrap();
            bits += m.bit_len() as u64;
            entries += m.entries.len() as u64;
        }
        means.push((eps, bits as f64 / k as f64));
        if eps == 4.0 {
            nonzero_at_4 = entries as f64 / k as f64;
        }
    }
    pass &= means.windows(2).all(|w| w[1].1 > w[0].1);
    let c = means.iter().map(|&(eps, b)| b / eps).fold(0.0, f64::max);
    let w4 = ldp_width(4.0).unwrap() as f64;
    let target = 1.0 + w4 * 2.0 / (1.0 + 2.0f64.exp());
    let rel = (nonzero_at_4 - target).abs() / target;
    pass &= rel <= 0.02;
    let bits: Vec<String> = means.iter().map(|(e, b)| format!("{e}:{b:.2}")).collect();
    let detail = format!(
        "mean bits per message {}, total <= {c:.2} * eps * k, nonzero entries at eps 4 {nonzero_at_4:.4} vs {target:.4} (rel {rel:.3} vs 0.02)",
        bits.join(" ")
    );
    report(4, "LDP communication", pass, detail, start);
    assert!(pass);
}

/// Runs one deterministic stream and compares every estimate at every step.
fn exact_sweep_case(n: u64, k: u64, s: u64, mode: StreamMode, u: u64) -> Result<bool, String> {
    let cfg = StreamConfig::new(n, s, k, 1.0, 0.01, u, mode).with_deterministic(true);
    let mut run = StreamRun::new(cfg, 0).map_err(|e| e.to_string())?;
    let window = run.setup().window;
    let mut history: Vec<Vec<u64>> = Vec::new();
    for t in 1..=n {
        let step: Vec<u64> = (0..k).map(|i| (t * 5 + i * 3 + t * i) % u).collect();
        run.step(&step).map_err(|e| e.to_string())?;
        history.push(step);
        let lo = window.map_or(0, |w| t.saturating_sub(w)) as usize;
        let mut counts = vec![0u64; u as usize];
        for step in &history[lo..] {
            for &x in step {
                counts[x as usize] += 1;
            }
        }
        for j in 0..u {
            let est = run.aggregator().estimate(j).map_err(|e| e.to_string())?;
            if est != counts[j as usize] as f64 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[test]
fn criterion_05_deterministic_streaming() {
    let start = Instant::now();
    let u = 6u64;
    let mut cases = 0;
    let mut failures = Vec::new();
    for n in 1..=128u64 {
        for k in 1..=8u64 {
            for s in [1u64, 3, 8, 32] {
                let b = n.div_ceil(s);
                let mut modes = vec![StreamMode::Full];
                modes.extend([b, 2 * b, 4 * b].map(|w| StreamMode::Sliding { w }));
                for mode in modes {
                    cases += 1;
                    match exact_sweep_case(n, k, s, mode, u) {
                        Ok(true) => {}
                        Ok(false) => failures.push(format!("n={n} k={k} s={s} {mode:?}")),
                        Err(e) => failures.push(format!("n={n} k={k} s={s} {mode:?}: {e}")),
                    }
                }
            }
        }
    }
    let pass = failures.is_empty();
    let first = failures.first().cloned().unwrap_or_default();
    report(5, "deterministic streaming exactness", pass, format!("{cases} configurations, {} mismatches {first}", failures.len()), start);
    assert!(pass);
}

#[test]
fn criterion_06_dyadic_oracle() {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    for m in 1..=256u64 {
        for q in 0..=m {
            checked += 1;
            let blocks = dyadic_decompose(q, m).unwrap();
            let mut covered = BTreeSet::new();
            let mut disjoint = true;
            for b in &blocks {
                for e in b.first_epoch(m)..=b.last_epoch(m) {
                    disjoint &= covered.insert(e);
                }
            }
            let exact = covered == (1..=q).collect::<BTreeSet<u64>>();
            if !disjoint || !exact || blocks.len() as u32 != q.count_ones() {
                bad.push((m, q));
            }
        }
    }
    let pass = bad.is_empty();
    report(6, "dyadic oracle", pass, format!("{checked} (m, q) pairs, {} failures", bad.len()), start);
    assert!(pass);
}

/// Max absolute error over the `top` items for basic and noisycs at one `s`.
fn trend_errors(items: &[u64], u: u64, k: usize, s: f64, seed: u64, top: &[(u64, u64)]) -> (f64, f64, u64, u64) {
    let n_total = items.len() as u64;
    let parts = partition_uniform(items, k, derive_seed(seed, 0, Purpose::Partition, 0)).unwrap();
    let parties: Vec<PartyDataset> = parts
        .iter()
        .enumerate()
        .map(|(i, p)| PartyDataset::new(i as u64, FrequencyVector::from_items(p.iter().copied())).unwrap())
        .collect();
    let cfg = OneShotConfig::new(2.0, 0.01, s, k, n_total, u).unwrap();
    let mut ours = BasicAggregator::new();
    let mut base = NoisyCsAggregator::new();
    let (mut words_ours, mut words_base) = (0u64, 0u64);
    let shared = derive_seed(seed, u64::MAX, Purpose::Sketch, s.to_bits());
    for p in &parties {
        let mut rng = seeded_rng(derive_seed(seed, p.id(), Purpose::Noise, s.to_bits()));
        let m = basic_party_message(p, &cfg, derive_seed(seed, p.id(), Purpose::Sketch, s.to_bits()), &mut rng).unwrap();
        words_ours += m.sketch.sketch().counter_count() as u64;
        ours.ingest(m).unwrap();
        let m = noisycs_party_message(p, &cfg, shared, &mut rng).unwrap();
        words_base += m.sketch.sketch().counter_count() as u64;
        base.ingest(m).unwrap();
    }
    let err = |o: &dyn FrequencyOracle| top.iter().map(|&(j, c)| (o.estimate(j).unwrap() - c as f64).abs()).fold(0.0, f64::max);
    (err(&ours), err(&base), words_ours, words_base)
}

#[test]
fn criterion_07_error_communication_trend() {
    let start = Instant::now();
    let (u, n, k) = (10_000u64, 100_000usize, 100usize);
    let sizes = [8.0, 16.0, 32.0, 64.0, 128.0];
    let seeds = 5u64;
    let mut ours = vec![Vec::new(); sizes.len()];
    let mut wins = vec![0u32; sizes.len()];
    let mut words = vec![(0u64, 0u64); sizes.len()];
    for seed in 0..seeds {
        let items = zipf_generate(u, n, 1.2, 1000 + seed).unwrap();
        let truth = FrequencyVector::from_items(items.iter().copied());
        let mut top: Vec<(u64, u64)> = truth.iter().collect();
        top.sort_by_key(|&(j, c)| (std::cmp::Reverse(c), j));
        top.truncate(20);
        for (i, &s) in sizes.iter().enumerate() {
            let (e_ours, e_base, w_ours, w_base) = trend_errors(&items, u, k, s, seed, &top);
            ours[i].push(e_ours);
            if e_base >= e_ours {
                wins[i] += 1;
            }
            words[i] = (w_ours, w_base);
        }
    }
    let medians: Vec<f64> = ours.iter().map(|v| median(v.clone())).collect();
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let baseline_ok = wins.iter().all(|&w| w >= 4);
    let pass = decreasing && baseline_ok;
    let detail = format!(
        "median max error {:?}, baseline >= ours in {:?} of {seeds} seeds, counters (ours, baseline) {:?}",
        medians.iter().map(|m| m.round()).collect::<Vec<_>>(),
        wins,
        words
    );
    report(7, "error-communication trend", pass, detail, start);
    assert!(pass);
}

#[test]
fn criterion_08_preset_heavy_hitters() {
    use freqmdp::harness::{run_experiment, DataSource, ExperimentConfig, Protocol};
    let start = Instant::now();
    let source = DataSource::Zipf { u: 10_000, n: 100_000, skew: 1.2 };
    let mut cfg = ExperimentConfig::preset("paper-oneshot", Protocol::Basic, source).unwrap();
    cfg.seed = 8;
    cfg.trials = 5;
    cfg.omit_timing = true;
    let rows = run_experiment(&cfg).unwrap();
    let mean = rows.iter().find(|r| r.trial.is_none()).unwrap().report;
    let pass = mean.precision >= 0.9 && mean.recall >= 0.9;
    let detail = format!(
        "s {}, precision {:.3}, recall {:.3}, reported {}, true heavy {}",
        cfg.resolved_s().unwrap(),
        mean.precision,
        mean.recall,
        mean.reported,
        mean.true_heavy
    );
    report(8, "preset heavy hitters", pass, detail, start);
    assert!(pass);
}

#[test]
fn criterion_09_space_audit() {
    let start = Instant::now();
    let n = 4096u64;
    let mut ratios = Vec::new();
    let mut parts = Vec::new();
    for s in [16u64, 64, 256] {
        let mut st = single_stream_mode(n, s, 1.0, 0.01, 1000, 9).unwrap();
        let mut peak = 0usize;
        for t in 0..n {
            st.push((t * 31) % 1000).unwrap();
            peak = peak.max(st.resident_counters());
        }
        let scale = s as f64 * (s as f64).log2().sqrt();
        ratios.push(peak as f64 / scale);
        parts.push(format!("s {s}: {peak} counters"));
    }
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = spread <= 2.0;
    report(9, "space audit", pass, format!("{}, ratio spread {spread:.3} vs 2", parts.join(", ")), start);
    assert!(pass);
}

#[test]
fn criterion_10_privacy_ledger() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    let mut failures = 0;
    let configs = 100;
    for c in 0..configs {
        let eps = rng.random_range(0.1..8.0);
        let beta = rng.random_range(0.001..0.5);
        let k = rng.random_range(1..40usize);
        let u = rng.random_range(2..500u64);
        let s = rng.random_range(1.0..200.0);
        let per_party = rng.random_range(1..50u64);
        let n_total = k as u64 * per_party;
        let cfg = OneShotConfig::new(eps, beta, s, k, n_total, u).unwrap();
        let data = FrequencyVector::from_items((0..per_party).map(|i| (i * 7 + c) % u));
        let party = PartyDataset::new(0, data).unwrap();
        let mut totals = Vec::new();
        let m = basic_party_message(&party, &cfg, c, &mut rng).unwrap();
        totals.push(basic_ledger(&m).total());
        let m = noisycs_party_message(&party, &cfg, c, &mut rng).unwrap();
        totals.push(basic_ledger(&m).total());
        totals.push(freqsep_ledger(&cfg, light_rows(k, beta)).unwrap().total());
        totals.push(ldp_ledger(eps, false).unwrap().total());
        let n = rng.random_range(1..300u64);
        let ss = rng.random_range(1..64u64);
        let mode = if c % 2 == 0 { StreamMode::Full } else { StreamMode::Sliding { w: rng.random_range(1..=n) } };
        let setup = StreamSetup::new(StreamConfig::new(n, ss, k as u64, eps, beta, u, mode)).unwrap();
        totals.push(setup.ledger().total());
        for t in totals {
            worst = worst.max(t / eps);
            if t > eps * (1.0 + 1e-9) {
                failures += 1;
            }
        }
    }
    let pass = failures == 0;
    report(10, "privacy ledger", pass, format!("{configs} configurations x 5 protocols, worst total / eps {worst:.6}, {failures} over budget"), start);
    assert!(pass);
}
