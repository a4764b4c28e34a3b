// SPDX-License-Identifier: Apache-2.0
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
//
// Benchmark graphs are read from $GSET_DIR, falling back to data/gset at the
// workspace root. A file may be named `G1` or `G1.txt`.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::time::Instant;

use pccop::activation::{Activation, ActivationKind};
use pccop::engine::{run_prepared, sweep_sequential, PreparedProblem};
use pccop::fixedpoint::{FixedQ, QFormat};
use pccop::hwmodel::{cycles_and_time, DEFAULT_CLOCK_HZ};
use pccop::problem::{benchmark, BENCHMARKS};
use pccop::rng::{Lfsr21, RngBank, LFSR_PERIOD};
use pccop::{
    parse_gset, AnnealSchedule, BestKnownRegistry, CouplingMatrix, EngineConfig, InitialState,
    MaxCutProblem, SeedBlock, SpinState,
};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("k-way equivalence", kway_equivalence),
        ("Boltzmann fidelity", boltzmann_fidelity),
        ("G1 benchmark", g1_benchmark),
        ("G11 benchmark", g11_benchmark),
        ("timing identities", timing_identities),
        ("annealing range", annealing_range),
        ("parser and registry", parser_and_registry),
        ("energy and cut oracle", energy_and_cut_oracle),
        ("LFSR period", lfsr_period),
    ];
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {secs:.1} s)", idx + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}; {secs:.1} s)", idx + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_problem(rng: &mut ChaCha8Rng, n: usize, name: &str) -> MaxCutProblem {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            match rng.next_u32() % 3 {
                0 => edges.push((i, j, 1)),
                1 => edges.push((i, j, -1)),
                _ => {}
            }
        }
    }
    MaxCutProblem::new(name, n, edges).expect("valid random instance")
}

fn kway_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let sched = AnnealSchedule::from_reals(0.05, 1.05, 60).map_err(|e| e.to_string())?;
    let mut compared = 0u64;
    for inst in 0..100 {
        let n = [8, 16, 32, 64][inst % 4];
        let problem = random_problem(&mut rng, n, "random");
        let prepared = PreparedProblem::new(&problem, None).map_err(|e| e.to_string())?;
        let mut bytes = [0u8; 64];
        rng.fill_bytes(&mut bytes);
        let mut trajectories = Vec::new();
        for ways in [1, 2, 4] {
            let mut cfg = EngineConfig::new(SeedBlock::from_bytes(bytes));
            cfg.ways = ways;
            let mut states = Vec::new();
            run_prepared(&prepared, &cfg, &sched, |_, s| states.push(s.clone()))
                .map_err(|e| e.to_string())?;
            trajectories.push(states);
        }
        for (k, t) in [(2, &trajectories[1]), (4, &trajectories[2])] {
            if let Some(s) = (0..t.len()).find(|&s| t[s] != trajectories[0][s]) {
                return Err(format!(
                    "instance {inst} (n = {n}), k = {k} diverges at sample {}",
                    s + 1
                ));
            }
            compared += t.len() as u64;
        }
    }
    Ok(format!(
        "100 instances, {compared} samples compared, all identical"
    ))
}

// The test system: J12 = +1, J13 = -1, J23 = +1, h = (1, 0, -1).
const BOLTZMANN_J: [[i64; 3]; 3] = [[0, 1, -1], [1, 0, 1], [-1, 1, 0]];
const BOLTZMANN_H: [i64; 3] = [1, 0, -1];

fn boltzmann_tv(beta: f64, samples: u64, seed: u64) -> Result<f64, String> {
    let dense: Vec<i8> = BOLTZMANN_J.iter().flatten().map(|&v| v as i8).collect();
    let j = CouplingMatrix::from_dense(3, &dense, BOLTZMANN_H.iter().map(|&h| h as i32).collect())
        .map_err(|e| e.to_string())?;
    let act = Activation::new(ActivationKind::LutTanh);
    let b = FixedQ::from_real(beta, QFormat::Q4_20).map_err(|e| e.to_string())?;
    let mut bytes = [0u8; 64];
    ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut bytes);
    let mut bank =
        RngBank::from_seed(&SeedBlock::from_bytes(bytes), 4).map_err(|e| e.to_string())?;
    let mut state = SpinState::new(3, true);
    for _ in 0..1000 {
        sweep_sequential(&mut state, &j, b, &mut bank, &act);
    }
    let mut counts = [0u64; 8];
    for _ in 0..samples {
        sweep_sequential(&mut state, &j, b, &mut bank, &act);
        let idx = (0..3).fold(0, |acc, i| acc | (state.bit(i) as usize) << i);
        counts[idx] += 1;
    }
    // Exhaustive oracle: p(m) ~ exp(-beta E(m)).
    let weights: Vec<f64> = (0..8)
        .map(|idx| {
            let m: Vec<i64> = (0..3)
                .map(|i| if idx >> i & 1 == 1 { 1 } else { -1 })
                .collect();
            let mut e = 0;
            for a in 0..3 {
                e -= BOLTZMANN_H[a] * m[a];
                for c in a + 1..3 {
                    e -= BOLTZMANN_J[a][c] * m[a] * m[c];
                }
            }
            (-beta * e as f64).exp()
        })
        .collect();
    let z: f64 = weights.iter().sum();
    Ok(0.5
        * (0..8)
            .map(|k| (counts[k] as f64 / samples as f64 - weights[k] / z).abs())
            .sum::<f64>())
}

fn boltzmann_fidelity() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for beta in [0.5, 1.0] {
        let tv = boltzmann_tv(beta, 1_000_000, 7)?;
        ok &= tv < 0.02;
        parts.push(format!("beta {beta}: TV {tv:.4}"));
    }
    let detail = format!("{}; limit 0.02", parts.join(", "));
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gset_dir() -> PathBuf {
    std::env::var_os("GSET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/gset"))
}

fn load_graph(name: &str) -> Result<MaxCutProblem, String> {
    let dir = gset_dir();
    let path = [name.to_string(), format!("{name}.txt")]
        .iter()
        .map(|f| dir.join(f))
        .find(|p| p.is_file())
        .ok_or_else(|| {
            format!(
                "data missing: {name} not found in {} (set GSET_DIR)",
                dir.display()
            )
        })?;
    let file = File::open(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_gset(BufReader::new(file), name).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs the standard protocol and returns the final cut of every trial.
fn protocol(problem: &MaxCutProblem, trials: u64) -> Result<Vec<i64>, String> {
    let sched = AnnealSchedule::preset_1000();
    let prepared = PreparedProblem::new(problem, None).map_err(|e| e.to_string())?;
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(trials as usize);
    let next = std::sync::atomic::AtomicU64::new(0);
    let mut cuts = vec![0i64; trials as usize];
    let results: Vec<Vec<(u64, Result<i64, String>)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut out = Vec::new();
                    loop {
                        let t = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if t >= trials {
                            break out;
                        }
                        let mut bytes = [0u8; 64];
                        ChaCha8Rng::seed_from_u64(0xACCE_0000 + t).fill_bytes(&mut bytes);
                        let mut cfg = EngineConfig::new(SeedBlock::from_bytes(bytes));
                        cfg.ways = 4;
                        cfg.activation = ActivationKind::PwlA1;
                        cfg.initial_state = InitialState::Random;
                        let r = run_prepared(&prepared, &cfg, &sched, |_, _| {});
                        out.push((t, r.map(|r| r.final_cut).map_err(|e| e.to_string())));
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    for (t, r) in results.into_iter().flatten() {
        cuts[t as usize] = r?;
    }
    Ok(cuts)
}

fn accuracy_stats(name: &str, cuts: &[i64]) -> Result<(i64, f64), String> {
    let reg = BestKnownRegistry::builtin();
    let best = *cuts.iter().max().expect("at least one trial");
    let mean = cuts
        .iter()
        .map(|&c| reg.accuracy(c, name))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?
        .iter()
        .sum::<f64>()
        / cuts.len() as f64;
    Ok((best, mean))
}

fn g1_benchmark() -> Outcome {
    let problem = load_graph("G1")?;
    let cuts = protocol(&problem, 20)?;
    let (best, mean) = accuracy_stats("G1", &cuts)?;
    let detail = format!("best cut {best} (need >= 11508), mean accuracy {mean:.4} (need >= 0.97)");
    if best >= 11508 && mean >= 0.97 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn g11_benchmark() -> Outcome {
    let problem = load_graph("G11")?;
    let cuts = protocol(&problem, 20)?;
    let (best, mean) = accuracy_stats("G11", &cuts)?;
    let detail = format!("best cut {best}, mean accuracy {mean:.4} (need >= 0.90)");
    if mean >= 0.90 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timing_identities() -> Outcome {
    let expected: [(usize, u64, u128); 6] = [
        (800, 1000, 2_010_000),
        (1000, 1000, 2_510_000),
        (2000, 1000, 5_010_000),
        (800, 100, 201_000),
        (1000, 100, 251_000),
        (2000, 100, 501_000),
    ];
    for (n_m, n_s, nanos) in expected {
        let t = cycles_and_time(n_m, n_s, 4, DEFAULT_CLOCK_HZ);
        ensure(t.nanos == nanos, || {
            format!("({n_m}, {n_s}) gave {} ns, expected {nanos}", t.nanos)
        })?;
    }
    Ok("all six per-trial times exact".into())
}

fn annealing_range() -> Outcome {
    let mut worst = 0.0f64;
    for (b0, rate, n) in [(0.01, 1.005, 1000u32), (0.01, 1.05, 100)] {
        let sched = AnnealSchedule::from_reals(b0, rate, n).map_err(|e| e.to_string())?;
        let mut beta = sched.beta_initial();
        for s in 1..=n {
            let real = b0 * rate.powi(s as i32 - 1);
            let rel = (beta.to_real() - real).abs() / real;
            worst = worst.max(rel);
            ensure(rel <= 1e-3, || {
                format!("({b0}, {rate}, {n}) sample {s}: relative error {rel:.3e}")
            })?;
            let next = pccop::engine::anneal_step(beta, sched.beta_anneal_rate());
            ensure(s == n || !next.saturated, || {
                format!("({b0}, {rate}, {n}) saturates at sample {}", s + 1)
            })?;
            beta = next.value;
        }
    }
    Ok(format!("no saturation, worst relative error {worst:.2e}"))
}

fn parser_and_registry() -> Outcome {
    let reg = BestKnownRegistry::builtin();
    ensure(reg.len() == 52, || {
        format!("registry has {} entries, expected 52", reg.len())
    })?;
    let g_count = BENCHMARKS
        .iter()
        .filter(|r| r.name.starts_with('G'))
        .count();
    ensure(g_count == 51, || {
        format!("{g_count} G-Set graphs, expected 51")
    })?;
    ensure(reg.get("K2000") == Some(33337), || {
        format!("K2000 = {:?}", reg.get("K2000"))
    })?;
    for (name, nodes, edges) in [("G1", 800, 19176), ("G11", 800, 1600)] {
        let record = benchmark(name).ok_or_else(|| format!("{name} missing from registry"))?;
        ensure((record.nodes, record.edges) == (nodes, edges), || {
            format!("{name} registry size mismatch")
        })?;
        let p = load_graph(name)?;
        ensure((p.n(), p.edges().len()) == (nodes, edges), || {
            format!(
                "{name} parsed to {} / {}, expected {nodes} / {edges}",
                p.n(),
                p.edges().len()
            )
        })?;
    }
    Ok("52 registry entries, K2000 = 33337, G1 800/19176, G11 800/1600".into())
}

fn energy_and_cut_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for inst in 0..3 {
        let p = random_problem(&mut rng, 12, "twelve");
        let j = p.to_coupling();
        for idx in 0..1u64 << 12 {
            let s = SpinState::from_index(12, idx);
            let m: Vec<i64> = (0..12)
                .map(|i| if idx >> i & 1 == 1 { 1 } else { -1 })
                .collect();
            let cut: i64 = p
                .edges()
                .iter()
                .filter(|e| m[e.i] != m[e.j])
                .map(|e| e.w as i64)
                .sum();
            let energy: i64 = p.edges().iter().map(|e| e.w as i64 * m[e.i] * m[e.j]).sum();
            ensure(p.cut_value(&s) == cut, || {
                format!("instance {inst} state {idx}: cut mismatch")
            })?;
            ensure(j.energy(&s) == energy, || {
                format!("instance {inst} state {idx}: energy mismatch")
            })?;
        }
    }
    Ok("3 instances x 4096 states exact".into())
}

fn lfsr_period() -> Outcome {
    let start = 1;
    let mut l = Lfsr21::new(start).map_err(|e| e.to_string())?;
    let mut steps = 0u64;
    loop {
        l.step();
        steps += 1;
        if l.state() == start {
            break;
        }
        ensure(steps < LFSR_PERIOD, || "period exceeds 2^21 - 1".into())?;
    }
    ensure(steps == LFSR_PERIOD, || {
        format!("period {steps}, expected {LFSR_PERIOD}")
    })?;
    Ok(format!("period {steps} = 2^21 - 1"))
}
