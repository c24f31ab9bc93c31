// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! Benchmark harness: datasets, partitioning, metrics, communication and the
//! experiment driver behind the `freqmdp` binary.

pub mod comm;
pub mod data;
pub mod experiment;
pub mod metrics;
pub mod partition;
pub mod zipf;

pub use comm::{Comm, CommModel};
pub use data::{load_transactions, trace_steps, write_transactions, Dataset};
pub use experiment::{run_experiment, write_csv, write_plot_data, DataSource, ExperimentConfig, ExperimentRow, Protocol, SizeSpec};
pub use metrics::{metrics_heavy_hitters, MetricsReport};
pub use partition::partition_uniform;
pub use zipf::zipf_generate;
