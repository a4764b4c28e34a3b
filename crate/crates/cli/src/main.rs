// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pccop::{ActivationKind, SeedBlock};
use pccop_cli::{graphs, run, trace, validate, OutputFormat, RunSpec};

#[derive(Parser)]
#[command(
    name = "pccop",
    version,
    about = "Max-cut experiments on a p-bit accelerator model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials on one or more graphs and report cuts and accuracy.
    Run(RunArgs),
    /// Write the per-sample beta, energy and cut of one trial as CSV.
    Trace(TraceArgs),
    /// Run the built-in self checks.
    Validate {
        /// Best known cut overrides ("name value" per line).
        #[arg(long)]
        registry: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// beta 0.01, rate 1.005, 1000 samples
    #[value(name = "1000")]
    Samples1000,
    /// beta 0.01, rate 1.05, 100 samples
    #[value(name = "100")]
    Samples100,
}

#[derive(Args)]
struct Common {
    /// Path to a G-Set file, or a graph name looked up in $GSET_DIR and data/gset.
    #[arg(long, required = true)]
    graph: Vec<String>,
    /// P-bits updated per cycle.
    #[arg(
        long,
        default_value = "4",
        value_parser = PossibleValuesParser::new(["1", "2", "4"]).map(|s| s.parse::<usize>().expect("listed value")),
    )]
    k: usize,
    #[arg(long, default_value = "pwl1")]
    activation: ActivationKind,
    /// Schedule preset; explicit --samples/--beta-init/--beta-rate win.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    samples: Option<u32>,
    #[arg(long)]
    beta_init: Option<f64>,
    #[arg(long)]
    beta_rate: Option<f64>,
    /// Base seed, 128 hex digits.
    #[arg(long)]
    seed: Option<SeedBlock>,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Include every trial's per-sample energy.
    #[arg(long)]
    trace_energy: bool,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Best known cut overrides ("name value" per line).
    #[arg(long)]
    registry: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    common: Common,
    /// Trial index whose seed is traced.
    #[arg(long, default_value_t = 0)]
    trial: u64,
}

impl Common {
    fn spec(&self) -> RunSpec {
        let mut spec = RunSpec::new(self.graph.clone());
        spec.k = self.k;
        spec.activation = self.activation;
        let (samples, beta_init, beta_rate) = match self.preset {
            Some(Preset::Samples100) => (100, 0.01, 1.05),
            _ => (1000, 0.01, 1.005),
        };
        spec.samples = self.samples.unwrap_or(samples);
        spec.beta_init = self.beta_init.unwrap_or(beta_init);
        spec.beta_rate = self.beta_rate.unwrap_or(beta_rate);
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        spec
    }

    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.output {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut spec = args.common.spec();
    spec.trials = args.trials;
    spec.format = args.format;
    spec.trace_energy = args.trace_energy;
    spec.workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let registry = graphs::registry(args.registry.as_deref())?;
    let problems = spec
        .graphs
        .iter()
        .map(|g| graphs::load(g))
        .collect::<Result<Vec<_>>>()?;
    let report = run(&problems, &spec, &registry)?;
    let mut out = args.common.writer()?;
    match spec.format {
        OutputFormat::Json => report.write_json(&mut out)?,
        OutputFormat::Csv => report.write_csv(&mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_trace(args: TraceArgs) -> Result<()> {
    anyhow::ensure!(
        args.common.graph.len() == 1,
        "trace takes exactly one --graph"
    );
    let spec = args.common.spec();
    let problem = graphs::load(&spec.graphs[0])?;
    let rows = trace(&problem, &spec, args.trial)?;
    let mut w = csv::Writer::from_writer(args.common.writer()?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_validate(registry: Option<PathBuf>) -> Result<bool> {
    let results = validate::run_all(registry.as_deref());
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = io::stdout().lock();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{:width$}  {status}  {}", r.name, r.detail)?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} checks, {failed} failed", results.len())?;
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args).map(|_| true),
        Command::Trace(args) => cmd_trace(args).map(|_| true),
        Command::Validate { registry } => cmd_validate(registry),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
