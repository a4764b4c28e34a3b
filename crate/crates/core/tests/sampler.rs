// SPDX-License-Identifier: Apache-2.0
// The engine against a from-scratch, step-by-step reimplementation.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use pccop::engine::{run_prepared, PreparedProblem};
use pccop::rng::{Lfsr21, RngBank};
use pccop::{AnnealSchedule, EngineConfig, InitialState, MaxCutProblem, SeedBlock, SpinState};

const SEED_HEX: &str = "0123456789abcdeffedcba98765432100f1e2d3c4b5a69788796a5b4c3d2e1f0\
                        13579bdf02468ace13579bdf02468acefdb97531eca86420fdb97531eca86420";

struct OracleLfsr(u32);

impl OracleLfsr {
    fn next(&mut self) -> i64 {
        let fb = (self.0 >> 20 ^ self.0 >> 18) & 1;
        self.0 = (self.0 << 1 | fb) & 0x1F_FFFF;
        if self.0 & 0x10_0000 != 0 {
            self.0 as i64 - (1 << 21)
        } else {
            self.0 as i64
        }
    }
}

fn oracle_bank(hex: &str) -> Vec<OracleLfsr> {
    let seed = BigUint::parse_bytes(hex.as_bytes(), 16).unwrap();
    (0..15)
        .map(|slot: usize| {
            let window: BigUint = (&seed >> (21 * slot)) & BigUint::from(0x1F_FFFFu32);
            let w = window.to_u32().unwrap();
            OracleLfsr(if w == 0 { 1 } else { w })
        })
        .collect()
}

#[test]
fn three_pbit_trajectory_matches_hand_execution() {
    let edges = [(0usize, 1usize, 1i8), (1, 2, -1), (0, 2, 1)];
    let problem = MaxCutProblem::new("tri", 3, edges).unwrap();
    let seed = SeedBlock::from_hex(SEED_HEX).unwrap();
    let start = SpinState::from_spins(&[1, -1, 1]);
    let mut cfg = EngineConfig::new(seed);
    cfg.ways = 1;
    cfg.initial_state = InitialState::Given(start.clone());
    let sched = AnnealSchedule::from_reals(0.5, 1.05, 40).unwrap();

    let prepared = PreparedProblem::new(&problem, None).unwrap();
    let mut seen = Vec::new();
    let result = run_prepared(&prepared, &cfg, &sched, |_, s| seen.push(s.clone())).unwrap();

    // J = -w; h = 0; PWL with T = 1 is a clamp to [-1, 1].
    let mut j = [[0i64; 3]; 3];
    for (a, b, w) in edges {
        j[a][b] = -(w as i64);
        j[b][a] = -(w as i64);
    }
    let mut lfsrs = oracle_bank(SEED_HEX);
    let mut m: Vec<i64> = vec![1, -1, 1];
    let mut beta: i64 = (0.5f64 * 1048576.0).round() as i64;
    let rate: i64 = (1.05f64 * 1048576.0).round() as i64;
    for (s, observed) in seen.iter().enumerate() {
        for i in 0..3 {
            let sum: i64 = (0..3).map(|k| j[i][k] * m[k]).sum();
            let act = (beta * sum).clamp(-(1 << 20), 1 << 20);
            let r = lfsrs[i].next();
            m[i] = if r + act >= 0 { 1 } else { -1 };
        }
        let expected: Vec<i8> = m.iter().map(|&v| v as i8).collect();
        assert_eq!(
            observed.spins().collect::<Vec<_>>(),
            expected,
            "sample {}",
            s + 1
        );
        beta = (beta * rate + (1 << 19)) >> 20;
    }
    assert_eq!(seen.len(), 40);
    assert_eq!(result.draws, 120);
    assert_eq!(result.final_state, seen[39]);
}

#[test]
fn bank_matches_oracle_slices() {
    let seed = SeedBlock::from_hex(SEED_HEX).unwrap();
    let bank = RngBank::from_seed(&seed, 4).unwrap();
    let oracle = oracle_bank(SEED_HEX);
    let states: Vec<u32> = bank.lfsrs().iter().map(|l| l.state()).collect();
    assert_eq!(states, oracle.iter().map(|o| o.0).collect::<Vec<_>>());
    let mut l = Lfsr21::new(states[0]).unwrap();
    let mut o = OracleLfsr(states[0]);
    for _ in 0..10_000 {
        assert_eq!(l.draw_raw(), o.next());
    }
}

#[test]
fn draws_per_sample_do_not_depend_on_ways() {
    let edges: Vec<_> = (0..37)
        .map(|i| (i, (i * 7 + 3) % 37, 1i8))
        .filter(|e| e.0 != e.1)
        .collect();
    let mut uniq = std::collections::HashSet::new();
    let edges: Vec<_> = edges
        .into_iter()
        .filter(|e| uniq.insert((e.0.min(e.1), e.0.max(e.1))))
        .collect();
    let problem = MaxCutProblem::new("ring", 37, edges).unwrap();
    let sched = AnnealSchedule::from_reals(0.1, 1.02, 25).unwrap();
    let mut reference = None;
    for ways in [1, 2, 3, 4, 8] {
        let mut cfg = EngineConfig::new(SeedBlock::from_u64(99));
        cfg.ways = ways;
        let r = pccop::run_trial(&problem, &cfg, &sched).unwrap();
        assert_eq!(r.draws, 37 * 25);
        assert_eq!(r.cycles, (37u64.div_ceil(ways as u64) + 1) * 25);
        let key = (r.final_state.clone(), r.best_cut, r.sample_at_best);
        assert_eq!(reference.get_or_insert(key.clone()), &key);
    }
}

#[test]
fn schedules_are_monotone_and_match_integer_iteration() {
    for (b0, rate, n) in [
        (0.01, 1.005, 1000u32),
        (0.01, 1.05, 100),
        (0.2, 1.0, 50),
        (1.0, 1.001, 500),
    ] {
        let sched = AnnealSchedule::from_reals(b0, rate, n).unwrap();
        let betas: Vec<i64> = sched.betas().map(|b| b.raw()).collect();
        assert_eq!(betas.len(), n as usize);
        assert!(betas.windows(2).all(|w| w[0] <= w[1]));
        let r = sched.beta_anneal_rate().raw() as i128;
        let mut b = sched.beta_initial().raw() as i128;
        for &got in &betas {
            assert_eq!(got as i128, b);
            b = (b * r + (1 << 19)) >> 20;
        }
    }
}
