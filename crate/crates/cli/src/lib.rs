// SPDX-License-Identifier: Apache-2.0
//! Benchmark harness around the `pccop` accelerator model: loads graphs,
//! runs seeded multi-trial experiments and writes CSV or JSON reports.

pub mod graphs;
pub mod report;
pub mod runner;
pub mod validate;

pub use report::{GraphReport, RunReport, Summary, TrialRecord};
pub use runner::{run, trace, trial_seed, OutputFormat, RunSpec, TraceRow};
