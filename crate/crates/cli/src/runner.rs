// SPDX-License-Identifier: Apache-2.0
//! Seeded multi-trial runs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use anyhow::{anyhow, ensure, Result};
use pccop::engine::{run_prepared, PreparedProblem};
use pccop::hwmodel::{cycles_and_time, DEFAULT_CLOCK_HZ};
use pccop::{
    ActivationKind, AnnealSchedule, BestKnownRegistry, EngineConfig, InitialState, MaxCutProblem,
    SeedBlock,
};
use serde::Serialize;
use sha2::{Digest, Sha512};

use crate::report::{GraphReport, RunReport, Summary, TrialRecord};

const TRIAL_SEED_TAG: &[u8] = b"pccop/trial-seed/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Everything that determines a run's numerical results, plus output options.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub graphs: Vec<String>,
    pub k: usize,
    #[serde(serialize_with = "activation_name")]
    pub activation: ActivationKind,
    pub samples: u32,
    pub beta_init: f64,
    pub beta_rate: f64,
    pub trials: u64,
    pub seed: SeedBlock,
    pub trace_energy: bool,
    pub format: OutputFormat,
    #[serde(skip)]
    pub workers: usize,
}

fn activation_name<S: serde::Serializer>(k: &ActivationKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(k.cli_name())
}

impl RunSpec {
    pub fn new(graphs: Vec<String>) -> Self {
        RunSpec {
            graphs,
            k: 4,
            activation: ActivationKind::PwlA1,
            samples: 1000,
            beta_init: 0.01,
            beta_rate: 1.005,
            trials: 1,
            seed: SeedBlock::from_bytes([0; 64]),
            trace_energy: false,
            format: OutputFormat::Json,
            workers: 1,
        }
    }

    pub fn schedule(&self) -> Result<AnnealSchedule> {
        Ok(AnnealSchedule::from_reals(
            self.beta_init,
            self.beta_rate,
            self.samples,
        )?)
    }

    fn engine_config(&self, trial: u64) -> EngineConfig {
        let mut cfg = EngineConfig::new(trial_seed(&self.seed, trial));
        cfg.ways = self.k;
        cfg.activation = self.activation;
        cfg.initial_state = InitialState::Random;
        cfg.record_traces = self.trace_energy;
        cfg
    }
}

/// Seed block of trial `trial`: SHA-512 over a fixed tag, the base seed and
/// the little-endian trial index.
pub fn trial_seed(base: &SeedBlock, trial: u64) -> SeedBlock {
    let mut h = Sha512::new();
    h.update(TRIAL_SEED_TAG);
    h.update(base.as_bytes());
    h.update(trial.to_le_bytes());
    let mut bytes = [0u8; 64];
    bytes.copy_from_slice(&h.finalize());
    SeedBlock::from_bytes(bytes)
}

fn run_graph(
    problem: &MaxCutProblem,
    spec: &RunSpec,
    registry: &BestKnownRegistry,
) -> Result<GraphReport> {
    let schedule = spec.schedule()?;
    let prepared = PreparedProblem::new(problem, None)?;
    let best_known = registry.get(problem.name());
    let timing = cycles_and_time(problem.n(), spec.samples as u64, spec.k, DEFAULT_CLOCK_HZ);
    let trials = spec.trials as usize;
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();

    let results: Vec<_> = std::thread::scope(|scope| {
        for _ in 0..spec.workers.clamp(1, trials.max(1)) {
            let tx = tx.clone();
            let (next, prepared, schedule) = (&next, &prepared, &schedule);
            scope.spawn(move || loop {
                let t = next.fetch_add(1, Ordering::Relaxed);
                if t >= trials {
                    break;
                }
                let cfg = spec.engine_config(t as u64);
                let start = Instant::now();
                let result = run_prepared(prepared, &cfg, schedule, |_, _| {});
                let wall = start.elapsed().as_secs_f64() * 1e3;
                if tx.send((t, result, wall)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        rx.iter().collect()
    });

    let mut records = Vec::with_capacity(trials);
    for (t, result, wall) in results {
        let r = result?;
        records.push(TrialRecord {
            graph: problem.name().to_string(),
            trial: t as u64,
            seed: r.seed_used.to_hex(),
            cut: r.final_cut,
            energy: r.final_energy,
            best_cut: r.best_cut,
            sample_at_best: r.sample_at_best,
            accuracy: best_known.map(|b| r.final_cut as f64 / b as f64),
            cycles: r.cycles,
            hw_time_ns: timing.nanos,
            wall_time_ms: wall,
            energy_trace: r.energy_trace,
        });
    }
    records.sort_by_key(|r| r.trial);
    ensure!(
        records.len() == trials,
        "{} of {trials} trials completed",
        records.len()
    );

    Ok(GraphReport {
        graph: problem.name().to_string(),
        nodes: problem.n(),
        edges: problem.edges().len(),
        best_known,
        summary: Summary::from_records(&records),
        trials: records,
    })
}

pub fn run(
    problems: &[MaxCutProblem],
    spec: &RunSpec,
    registry: &BestKnownRegistry,
) -> Result<RunReport> {
    ensure!(
        matches!(spec.k, 1 | 2 | 4),
        "k must be 1, 2 or 4, got {}",
        spec.k
    );
    ensure!(spec.trials > 0, "at least one trial is required");
    let graphs = problems
        .iter()
        .map(|p| run_graph(p, spec, registry))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: spec.clone(),
        graphs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub sample: u32,
    pub beta: f64,
    pub energy: i64,
    pub cut: i64,
}

/// Per-sample beta, energy and cut of one trial.
pub fn trace(problem: &MaxCutProblem, spec: &RunSpec, trial: u64) -> Result<Vec<TraceRow>> {
    let schedule = spec.schedule()?;
    let prepared = PreparedProblem::new(problem, None)?;
    let mut cfg = spec.engine_config(trial);
    cfg.record_traces = true;
    let betas: Vec<f64> = schedule.betas().map(|b| b.to_real()).collect();
    let r = run_prepared(&prepared, &cfg, &schedule, |_, _| {})?;
    let energy = r
        .energy_trace
        .ok_or_else(|| anyhow!("engine returned no energy trace"))?;
    let cut = r
        .cut_trace
        .ok_or_else(|| anyhow!("engine returned no cut trace"))?;
    Ok((0..betas.len())
        .map(|s| TraceRow {
            sample: s as u32 + 1,
            beta: betas[s],
            energy: energy[s],
            cut: cut[s],
        })
        .collect())
}
