// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use crate::runner::RunSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub graph: String,
    pub trial: u64,
    pub seed: String,
    /// Cut and energy of the state read back after the last sample.
    pub cut: i64,
    pub energy: i64,
    pub best_cut: i64,
    pub sample_at_best: u32,
    pub accuracy: Option<f64>,
    pub cycles: u64,
    pub hw_time_ns: u128,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_trace: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub best_cut: i64,
    pub mean_cut: f64,
    pub mean_accuracy: Option<f64>,
    pub min_accuracy: Option<f64>,
    pub max_accuracy: Option<f64>,
}

impl Summary {
    pub fn from_records(records: &[TrialRecord]) -> Summary {
        let acc: Option<Vec<f64>> = records.iter().map(|r| r.accuracy).collect();
        let acc = acc.filter(|a| !a.is_empty());
        let n = records.len();
        Summary {
            trials: n,
            best_cut: records.iter().map(|r| r.cut).max().unwrap_or(0),
            mean_cut: if n == 0 {
                0.0
            } else {
                records.iter().map(|r| r.cut as f64).sum::<f64>() / n as f64
            },
            mean_accuracy: acc.as_ref().map(|a| a.iter().sum::<f64>() / a.len() as f64),
            min_accuracy: acc
                .as_ref()
                .map(|a| a.iter().copied().fold(f64::INFINITY, f64::min)),
            max_accuracy: acc
                .as_ref()
                .map(|a| a.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphReport {
    pub graph: String,
    pub nodes: usize,
    pub edges: usize,
    pub best_known: Option<i64>,
    pub summary: Summary,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub version: String,
    pub config: RunSpec,
    pub graphs: Vec<GraphReport>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    graph: &'a str,
    trial: u64,
    seed: &'a str,
    k: usize,
    activation: &'a str,
    samples: u32,
    beta_init: f64,
    beta_rate: f64,
    cut: i64,
    energy: i64,
    best_cut: i64,
    sample_at_best: u32,
    accuracy: Option<f64>,
    cycles: u64,
    hw_time_ns: u128,
    wall_time_ms: f64,
    energy_trace: Option<String>,
}

impl RunReport {
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    /// Header row, then one record per trial.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let cfg = &self.config;
        let activation = cfg.activation.cli_name();
        for g in &self.graphs {
            for t in &g.trials {
                w.serialize(CsvRow {
                    graph: &t.graph,
                    trial: t.trial,
                    seed: &t.seed,
                    k: cfg.k,
                    activation,
                    samples: cfg.samples,
                    beta_init: cfg.beta_init,
                    beta_rate: cfg.beta_rate,
                    cut: t.cut,
                    energy: t.energy,
                    best_cut: t.best_cut,
                    sample_at_best: t.sample_at_best,
                    accuracy: t.accuracy,
                    cycles: t.cycles,
                    hw_time_ns: t.hw_time_ns,
                    wall_time_ms: t.wall_time_ms,
                    energy_trace: t
                        .energy_trace
                        .as_ref()
                        .map(|e| e.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")),
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
