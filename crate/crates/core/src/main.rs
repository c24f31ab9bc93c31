// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use freqmdp::harness::{run_experiment, write_csv, write_plot_data, DataSource, ExperimentConfig, Protocol, SizeSpec};
use freqmdp::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "freqmdp", version, about = "Multiparty differentially private frequency estimation benchmarks")]
struct Cli {
    #[command(subcommand)]
    mode: Mode,
}

#[derive(Subcommand, Debug)]
enum Mode {
    /// basic, ldp, freqsep or noisycs.
    Oneshot(Opts),
    /// stream-full or stream-window.
    Stream(Opts),
}

#[derive(Args, Debug)]
struct Opts {
    #[arg(long)]
    protocol: Option<String>,
    /// Transaction file: one whitespace-separated transaction per line.
    #[arg(long, conflicts_with = "zipf", required_unless_present = "zipf")]
    input: Option<PathBuf>,
    /// Synthetic data as u,N,skew.
    #[arg(long)]
    zipf: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Average message size, or "auto" for ceil(3 / (phi sqrt(k))).
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    phi: Option<f64>,
    /// Sliding window in steps.
    #[arg(long)]
    window: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// paper-oneshot or paper-stream; explicit flags override it.
    #[arg(long)]
    preset: Option<String>,
    /// Disables noise, randomized response, sampling and hash collisions.
    #[arg(long)]
    deterministic: bool,
    /// Odd sketch row count.
    #[arg(long)]
    rows: Option<usize>,
    /// Query times per streaming trial.
    #[arg(long)]
    probes: Option<usize>,
    /// Reporting cutoff as a fraction of N (default phi / 2).
    #[arg(long)]
    report_threshold: Option<f64>,
    /// Writes (series, t, x = comm_words, y) plot points to this file.
    #[arg(long)]
    emit_plot_data: Option<PathBuf>,
    /// Writes wall_ms = 0 for byte-identical output.
    #[arg(long)]
    omit_timing: bool,
    /// Charges every hash seed to the message.
    #[arg(long)]
    no_public_randomness: bool,
}

fn build(o: &Opts, streaming: bool) -> Result<ExperimentConfig> {
    let default = if streaming { "stream-full" } else { "basic" };
    let protocol: Protocol = o.protocol.as_deref().unwrap_or(default).parse()?;
    if protocol.is_streaming() != streaming {
        let mode = if streaming { "stream" } else { "oneshot" };
        return Err(Error::Config(format!("protocol {protocol} does not belong to the {mode} command")));
    }
    let source = match (&o.input, &o.zipf) {
        (Some(p), _) => DataSource::File(p.clone()),
        (None, Some(z)) => z.parse()?,
        (None, None) => return Err(Error::Config("one of --input or --zipf is required".into())),
    };
    let mut c = match &o.preset {
        Some(p) => ExperimentConfig::preset(p, protocol, source)?,
        None => ExperimentConfig::new(protocol, source),
    };
    c.seed = o.seed;
    c.deterministic = o.deterministic;
    c.omit_timing = o.omit_timing;
    c.public_randomness = !o.no_public_randomness;
    if let Some(v) = o.k {
        c.k = v;
    }
    if let Some(v) = o.eps {
        c.eps = v;
    }
    if let Some(v) = o.beta {
        c.beta = v;
    }
    if let Some(v) = &o.s {
        c.s = v.parse::<SizeSpec>()?;
    }
    if let Some(v) = o.phi {
        c.phi = v;
    }
    if let Some(v) = o.trials {
        c.trials = v;
    }
    if let Some(v) = o.probes {
        c.probes = v;
    }
    if o.rows.is_some() {
        c.rows = o.rows;
    }
    c.window = o.window.or(c.window);
    c.report_threshold = o.report_threshold;
    c.validate()?;
    Ok(c)
}

fn run(cli: Cli) -> Result<()> {
    let (opts, streaming) = match &cli.mode {
        Mode::Oneshot(o) => (o, false),
        Mode::Stream(o) => (o, true),
    };
    let cfg = build(opts, streaming)?;
    log::info!("running {} x{} trials", cfg.protocol, cfg.trials);
    let rows = run_experiment(&cfg)?;
    write_csv(&rows, BufWriter::new(File::create(&opts.out)?))?;
    if let Some(p) = &opts.emit_plot_data {
        write_plot_data(&rows, BufWriter::new(File::create(p)?))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("freqmdp: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::InvalidArgument(_) => 2,
                _ => 1,
            })
        }
    }
}
