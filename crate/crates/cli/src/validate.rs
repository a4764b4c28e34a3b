// SPDX-License-Identifier: Apache-2.0
//! Built-in self checks run by `pccop validate`.

use std::path::Path;

use pccop::activation::{Activation, ActivationKind};
use pccop::engine::{run_prepared, sweep_sequential, PreparedProblem};
use pccop::fixedpoint::{FixedQ, QFormat, Rounding};
use pccop::hwmodel::{cycles_and_time, Instruction, Opcode, DEFAULT_CLOCK_HZ};
use pccop::problem::BENCHMARKS;
use pccop::rng::{Lfsr21, RngBank, LFSR_PERIOD};
use pccop::{AnnealSchedule, CouplingMatrix, EngineConfig, MaxCutProblem, SeedBlock, SpinState};

use crate::graphs;
use crate::runner::trial_seed;

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = Result<String, String>;
type NamedCheck<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs every check; `registry` is an optional override file.
pub fn run_all(registry: Option<&Path>) -> Vec<CheckResult> {
    let checks: [NamedCheck; 7] = [
        ("k-way equivalence", Box::new(kway_equivalence)),
        ("Boltzmann sampling", Box::new(boltzmann)),
        ("fixed-point round trips", Box::new(fixed_point)),
        ("timing identities", Box::new(timing)),
        ("annealing schedule", Box::new(annealing)),
        ("LFSR period", Box::new(lfsr)),
        ("registry", Box::new(move || registry_check(registry))),
    ];
    checks
        .into_iter()
        .map(|(name, f)| {
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                name,
                passed,
                detail,
            }
        })
        .collect()
}

/// Small deterministic instance generator (splitmix64).
struct Mix(u64);

impl Mix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

fn kway_equivalence() -> Check {
    let mut mix = Mix(17);
    let sched = AnnealSchedule::from_reals(0.05, 1.05, 40).map_err(|e| e.to_string())?;
    for inst in 0..24u64 {
        let n = [8, 16, 32, 64][inst as usize % 4];
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                match mix.next() % 3 {
                    0 => edges.push((i, j, 1)),
                    1 => edges.push((i, j, -1)),
                    _ => {}
                }
            }
        }
        let p = MaxCutProblem::new("random", n, edges).map_err(|e| e.to_string())?;
        let prepared = PreparedProblem::new(&p, None).map_err(|e| e.to_string())?;
        let seed = trial_seed(&SeedBlock::from_u64(inst), inst);
        let mut runs = Vec::new();
        for ways in [1, 2, 4] {
            let mut cfg = EngineConfig::new(seed);
            cfg.ways = ways;
            let mut states = Vec::new();
            run_prepared(&prepared, &cfg, &sched, |_, s| states.push(s.clone()))
                .map_err(|e| e.to_string())?;
            runs.push(states);
        }
        check(runs[1] == runs[0] && runs[2] == runs[0], || {
            format!("instance {inst} (n = {n}) diverges")
        })?;
    }
    Ok("24 instances, k = 2 and 4 identical to k = 1".into())
}

fn boltzmann() -> Check {
    let j_rows: [[i64; 3]; 3] = [[0, 1, -1], [1, 0, 1], [-1, 1, 0]];
    let h = [1i64, 0, -1];
    let beta = 1.0;
    let dense: Vec<i8> = j_rows.iter().flatten().map(|&v| v as i8).collect();
    let j = CouplingMatrix::from_dense(3, &dense, h.iter().map(|&v| v as i32).collect())
        .map_err(|e| e.to_string())?;
    let act = Activation::new(ActivationKind::LutTanh);
    let b = FixedQ::from_real(beta, QFormat::Q4_20).map_err(|e| e.to_string())?;
    let seed = trial_seed(&SeedBlock::from_u64(3), 0);
    let mut bank = RngBank::from_seed(&seed, 4).map_err(|e| e.to_string())?;
    let mut state = SpinState::new(3, true);
    let samples = 1_000_000u64;
    let mut counts = [0u64; 8];
    for s in 0..samples + 1000 {
        sweep_sequential(&mut state, &j, b, &mut bank, &act);
        if s >= 1000 {
            counts[(0..3).fold(0, |a, i| a | (state.bit(i) as usize) << i)] += 1;
        }
    }
    let weights: Vec<f64> = (0..8)
        .map(|idx| {
            let m: Vec<i64> = (0..3)
                .map(|i| if idx >> i & 1 == 1 { 1 } else { -1 })
                .collect();
            let mut e = 0;
            for a in 0..3 {
                e -= h[a] * m[a];
                for c in a + 1..3 {
                    e -= j_rows[a][c] * m[a] * m[c];
                }
            }
            (-beta * e as f64).exp()
        })
        .collect();
    let z: f64 = weights.iter().sum();
    let tv = 0.5
        * (0..8)
            .map(|k| (counts[k] as f64 / samples as f64 - weights[k] / z).abs())
            .sum::<f64>();
    check(tv < 0.02, || {
        format!("TV distance {tv:.4} at beta {beta} (limit 0.02)")
    })?;
    Ok(format!("TV distance {tv:.4} at beta {beta}, 10^6 samples"))
}

fn fixed_point() -> Check {
    let mut mix = Mix(99);
    for fmt in [
        QFormat::Q4_20,
        QFormat::Q1_20,
        QFormat::Q0_20,
        QFormat::Q2_20,
    ] {
        for _ in 0..10_000 {
            let span = (fmt.max_raw() - fmt.min_raw() + 1) as u64;
            let raw = fmt.min_raw() + (mix.next() % span) as i64;
            let x = FixedQ::from_raw(raw, fmt).map_err(|e| e.to_string())?;
            let back = FixedQ::from_real(x.to_real(), fmt).map_err(|e| e.to_string())?;
            check(back == x, || {
                format!("{x} does not round trip through a real")
            })?;
            let wide = x
                .convert(QFormat::new(20, 40).expect("valid"), Rounding::Floor)
                .value;
            check(wide.convert(fmt, Rounding::Floor).value == x, || {
                format!("{x} does not round trip widening")
            })?;
            let one = FixedQ::from_real(1.0, QFormat::Q4_20).expect("1.0 fits");
            check(x.mul(one, fmt).value == x, || format!("{x} * 1 != {x}"))?;
        }
    }
    for word in (0..1u64 << 32).step_by(65_537) {
        let w = word as u32 & !(0b11 << 28);
        let ins = Instruction::decode(w).map_err(|e| e.to_string())?;
        check(ins.encode() == w, || {
            format!("instruction {w:#010x} does not round trip")
        })?;
    }
    let run = Instruction::new(Opcode::Run, 2048, 1000).map_err(|e| e.to_string())?;
    check((run.n_m_field, run.n_s_field) == (2047, 1000), || {
        "Run instruction fields".into()
    })?;
    Ok("Q4.20, Q1.20, Q0.20, Q2.20 and instruction words".into())
}

fn timing() -> Check {
    for (n_m, n_s, nanos) in [
        (800, 1000, 2_010_000u128),
        (1000, 1000, 2_510_000),
        (2000, 1000, 5_010_000),
        (800, 100, 201_000),
        (1000, 100, 251_000),
        (2000, 100, 501_000),
    ] {
        let t = cycles_and_time(n_m, n_s, 4, DEFAULT_CLOCK_HZ);
        check(t.nanos == nanos, || {
            format!("({n_m}, {n_s}): {} ns, expected {nanos}", t.nanos)
        })?;
    }
    Ok("2.01 ms, 2.51 ms, 5.01 ms, 201 us, 251 us, 501 us".into())
}

fn annealing() -> Check {
    let mut worst = 0.0f64;
    for sched in [AnnealSchedule::preset_1000(), AnnealSchedule::preset_100()] {
        for (s, beta) in sched.betas().enumerate() {
            let real = sched.real_beta(s as u32 + 1);
            worst = worst.max((beta.to_real() - real).abs() / real);
        }
    }
    check(worst <= 1e-3, || {
        format!("relative error {worst:.2e} exceeds 1e-3")
    })?;
    Ok(format!(
        "both presets in range, worst relative error {worst:.2e}"
    ))
}

fn lfsr() -> Check {
    let mut l = Lfsr21::new(1).map_err(|e| e.to_string())?;
    let mut steps = 0;
    while steps == 0 || l.state() != 1 {
        l.step();
        steps += 1;
        check(steps <= LFSR_PERIOD, || "period exceeds 2^21 - 1".into())?;
    }
    check(steps == LFSR_PERIOD, || format!("period {steps}"))?;
    Ok(format!("period {steps}"))
}

fn registry_check(overrides: Option<&Path>) -> Check {
    let reg = graphs::registry(overrides).map_err(|e| format!("{e:#}"))?;
    let missing: Vec<&str> = BENCHMARKS
        .iter()
        .map(|r| r.name)
        .filter(|n| !reg.contains(n))
        .collect();
    check(missing.is_empty(), || {
        format!("missing {}", missing.join(", "))
    })?;
    Ok(format!("{} best known values", reg.len()))
}
