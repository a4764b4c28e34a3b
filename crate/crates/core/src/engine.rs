// SPDX-License-Identifier: Apache-2.0
//! The p-bit sampling core.
//!
//! One sample sweeps every p-bit once in ascending order. Position `i`
//! computes the integer row sum `S_i = h_i + sum_j J_ij m_j`, scales it by the
//! Q4.20 inverse temperature into an exact wide local field, applies the
//! activation, adds its Q0.20 draw and takes the comparator output
//! (`>= 0` gives +1).
//!
//! The k-way form processes blocks of `k` positions. Position `t` of a block
//! evaluates all `2^t` candidate sums, one per assignment of the block's
//! earlier positions, and keeps the one matching the spins those positions
//! actually resolved to. Every candidate of a position shares that
//! position's draw, and draws are consumed in position order from LFSR
//! `position mod bank size`, so k-way trajectories equal sequential ones bit
//! for bit.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::activation::{Activation, ActivationKind};
use crate::fixedpoint::{FixedQ, QFormat, Rounding, Saturating};
use crate::hwmodel::trial_cycles;
use crate::problem::{
    jm_product, CouplingMatrix, MaxCutProblem, ProblemError, SpinState, MAX_NODES,
};
use crate::rng::{RngBank, RngError, SeedBlock};

/// Format of `beta * S_i` before the activation: wide enough to hold any
/// Q4.20 times 32-bit product exactly.
pub const LOCAL_FIELD_FORMAT: QFormat = match QFormat::new(43, 20) {
    Ok(f) => f,
    Err(_) => unreachable!(),
};

/// Widest block the k-way update accepts.
pub const MAX_WAYS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("problem has {nodes} nodes but only {capacity} p-bits are configured")]
    Capacity { nodes: usize, capacity: usize },
    #[error("p-bit count {0} is outside 1..={MAX_NODES}")]
    PbitCount(usize),
    #[error("way count {0} is outside 1..={MAX_WAYS}")]
    Ways(usize),
    #[error("initial state has {actual} spins, expected {expected}")]
    InitialState { expected: usize, actual: usize },
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("beta leaves Q4.20 range at sample {0}")]
    ScheduleSaturates(u32),
    #[error(transparent)]
    Rng(#[from] RngError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// One annealing step: `beta * rate` in Q4.20, rounded to nearest on the
/// dropped product bits.
pub fn anneal_step(beta: FixedQ, rate: FixedQ) -> Saturating<FixedQ> {
    beta.mul_rounded(rate, QFormat::Q4_20, Rounding::HalfUp)
}

/// Geometric schedule `beta_s = beta_initial * rate^(s-1)`, `1 <= s <= N_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnealSchedule {
    beta_initial: FixedQ,
    beta_anneal_rate: FixedQ,
    n_samples: u32,
}

impl AnnealSchedule {
    pub fn new(
        beta_initial: FixedQ,
        beta_anneal_rate: FixedQ,
        n_samples: u32,
    ) -> Result<Self, EngineError> {
        for (name, v) in [
            ("beta_initial", beta_initial),
            ("beta_anneal_rate", beta_anneal_rate),
        ] {
            if v.format() != QFormat::Q4_20 {
                return Err(EngineError::Schedule(format!(
                    "{name} must be Q4.20, got {}",
                    v.format()
                )));
            }
        }
        if beta_initial.raw() <= 0 {
            return Err(EngineError::Schedule(
                "beta_initial must be positive".into(),
            ));
        }
        if beta_anneal_rate.raw() < 1 << 20 {
            return Err(EngineError::Schedule(
                "beta_anneal_rate must be at least 1".into(),
            ));
        }
        let schedule = AnnealSchedule {
            beta_initial,
            beta_anneal_rate,
            n_samples,
        };
        let mut beta = beta_initial;
        for s in 2..=n_samples {
            let next = anneal_step(beta, beta_anneal_rate);
            if next.saturated {
                return Err(EngineError::ScheduleSaturates(s));
            }
            beta = next.value;
        }
        Ok(schedule)
    }

    pub fn from_reals(
        beta_initial: f64,
        beta_anneal_rate: f64,
        n_samples: u32,
    ) -> Result<Self, EngineError> {
        let q = |name: &str, x: f64| {
            FixedQ::from_real(x, QFormat::Q4_20)
                .map_err(|e| EngineError::Schedule(format!("{name}: {e}")))
        };
        AnnealSchedule::new(
            q("beta_initial", beta_initial)?,
            q("beta_anneal_rate", beta_anneal_rate)?,
            n_samples,
        )
    }

    /// `(0.01, 1.005, 1000)`.
    pub fn preset_1000() -> Self {
        AnnealSchedule::from_reals(0.01, 1.005, 1000).expect("preset is valid")
    }

    /// `(0.01, 1.05, 100)`.
    pub fn preset_100() -> Self {
        AnnealSchedule::from_reals(0.01, 1.05, 100).expect("preset is valid")
    }

    /// Fixed inverse temperature for `n_samples` samples.
    pub fn constant(beta: f64, n_samples: u32) -> Result<Self, EngineError> {
        AnnealSchedule::from_reals(beta, 1.0, n_samples)
    }

    pub fn beta_initial(&self) -> FixedQ {
        self.beta_initial
    }

    pub fn beta_anneal_rate(&self) -> FixedQ {
        self.beta_anneal_rate
    }

    pub fn n_samples(&self) -> u32 {
        self.n_samples
    }

    /// `beta_1 ..= beta_{N_s}` as the hardware computes them.
    pub fn betas(&self) -> impl Iterator<Item = FixedQ> + '_ {
        let rate = self.beta_anneal_rate;
        std::iter::successors(Some(self.beta_initial), move |&b| {
            Some(anneal_step(b, rate).value)
        })
        .take(self.n_samples as usize)
    }

    /// Real-valued `beta_initial * rate^(s-1)` from the configured reals.
    pub fn real_beta(&self, sample: u32) -> f64 {
        self.beta_initial.to_real() * self.beta_anneal_rate.to_real().powi(sample as i32 - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialState {
    /// Drawn from an auxiliary ChaCha8 generator keyed by the seed block.
    Random,
    Given(SpinState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    /// p-bits updated per cycle.
    pub ways: usize,
    /// Configured p-bit count; defaults to the problem size. Extra p-bits
    /// have no couplings.
    pub n_m: Option<usize>,
    pub activation: ActivationKind,
    pub seed: SeedBlock,
    pub initial_state: InitialState,
    /// Way count whose LFSR bank (`2^rng_ways - 1` registers) supplies the
    /// draws. Independent of `ways` so that every update width sees the same
    /// draw stream.
    pub rng_ways: u32,
    pub record_traces: bool,
    /// Report the best sample seen instead of only the final one.
    pub track_best: bool,
}

impl EngineConfig {
    pub fn new(seed: SeedBlock) -> Self {
        EngineConfig {
            ways: 4,
            n_m: None,
            activation: ActivationKind::PwlA1,
            seed,
            initial_state: InitialState::Random,
            rng_ways: 4,
            record_traces: false,
            track_best: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    #[serde(serialize_with = "bit_string")]
    pub final_state: SpinState,
    pub final_cut: i64,
    pub final_energy: i64,
    #[serde(serialize_with = "bit_string")]
    pub best_state: SpinState,
    pub best_cut: i64,
    pub best_energy: i64,
    /// 0 is the initial state, `s` the state after sample `s`.
    pub sample_at_best: u32,
    pub energy_trace: Option<Vec<i64>>,
    pub cut_trace: Option<Vec<i64>>,
    pub cycles: u64,
    pub draws: u64,
    pub seed_used: SeedBlock,
    pub beta_saturated: bool,
}

fn bit_string<S: serde::Serializer>(state: &SpinState, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&state.to_bit_string())
}

/// `beta * (h_i + sum_j J_ij m_j)`, exact.
pub fn local_field(i: usize, state: &SpinState, coupling: &CouplingMatrix, beta: FixedQ) -> FixedQ {
    let sum = coupling.row_sum(i, state);
    field_from_sum(sum, beta)
}

fn field_from_sum(sum: i32, beta: FixedQ) -> FixedQ {
    let s = FixedQ::from_raw(sum as i64, QFormat::integer(31).expect("valid")).expect("i32 fits");
    let field = beta.mul(s, LOCAL_FIELD_FORMAT);
    debug_assert!(!field.saturated);
    field.value
}

/// Comparator: `draw + activation(field) >= 0`.
#[inline]
fn decide(field_raw: i64, draw_raw: i64, activation: &Activation) -> bool {
    draw_raw + activation.evaluate_raw(field_raw) >= 0
}

#[inline]
fn field_raw(sum: i32, beta_raw: i64) -> i64 {
    // beta has 20 fractional bits and the sum none, so the product is the
    // local field in 20-fractional-bit raw units with nothing dropped.
    beta_raw * sum as i64
}

/// New spin of p-bit `i` for a caller-supplied Q0.20 draw.
pub fn update_pbit(
    i: usize,
    state: &SpinState,
    coupling: &CouplingMatrix,
    beta: FixedQ,
    draw: FixedQ,
    activation: &Activation,
) -> i8 {
    let field = local_field(i, state, coupling, beta);
    let out = activation.evaluate(field);
    let s = draw.add(out).value;
    if s.is_negative() {
        -1
    } else {
        1
    }
}

/// One Gibbs-order sample, one p-bit at a time.
pub fn sweep_sequential(
    state: &mut SpinState,
    coupling: &CouplingMatrix,
    beta: FixedQ,
    bank: &mut RngBank,
    activation: &Activation,
) {
    let beta_raw = beta.raw();
    for i in 0..coupling.n() {
        let field = field_raw(coupling.row_sum(i, state), beta_raw);
        let draw = bank.draw_raw(i);
        state.set_bit(i, decide(field, draw, activation));
    }
}

/// One sample with `ways` p-bits resolved per cycle by speculate-and-select.
pub fn sweep_kway(
    state: &mut SpinState,
    coupling: &CouplingMatrix,
    beta: FixedQ,
    bank: &mut RngBank,
    activation: &Activation,
    ways: usize,
) {
    assert!(
        (1..=MAX_WAYS).contains(&ways),
        "ways must be in 1..={MAX_WAYS}"
    );
    let n = coupling.n();
    let beta_raw = beta.raw();
    let mut base = [0i32; MAX_WAYS];
    let mut draws = [0i64; MAX_WAYS];
    let mut outcomes: Vec<bool> = Vec::with_capacity(1 << ways);
    let mut start = 0;
    while start < n {
        let len = ways.min(n - start);

        // Adder trees: one row sum per position, read against the register as
        // it stood before the block, minus the in-block predecessors.
        for (t, b) in base.iter_mut().enumerate().take(len) {
            let row = start + t;
            let mut sum = coupling.row_sum(row, state);
            for u in 0..t {
                sum -= jm(coupling, row, start + u, state.bit(start + u)) as i32;
            }
            *b = sum;
        }
        for (t, d) in draws.iter_mut().enumerate().take(len) {
            *d = bank.draw_raw(start + t);
        }

        // Speculate: position t owns candidates 2^t - 1 .. 2^(t+1) - 1, one per
        // assignment of positions 0..t (bit u set = position u resolved to +1).
        outcomes.clear();
        for t in 0..len {
            let row = start + t;
            for spec in 0..1usize << t {
                let mut sum = base[t];
                for u in 0..t {
                    sum += jm(coupling, row, start + u, spec >> u & 1 == 1) as i32;
                }
                outcomes.push(decide(field_raw(sum, beta_raw), draws[t], activation));
            }
        }

        // Select along the realized path.
        let mut path = 0usize;
        for t in 0..len {
            let up = outcomes[(1 << t) - 1 + path];
            path |= (up as usize) << t;
            state.set_bit(start + t, up);
        }
        start += len;
    }
}

#[inline]
fn jm(coupling: &CouplingMatrix, i: usize, j: usize, bit: bool) -> i8 {
    jm_product(coupling.code(i, j), bit).expect("stored codes are valid")
}

/// Dispatches to the sequential sweep for one way.
pub fn sweep(
    state: &mut SpinState,
    coupling: &CouplingMatrix,
    beta: FixedQ,
    bank: &mut RngBank,
    activation: &Activation,
    ways: usize,
) {
    if ways == 1 {
        sweep_sequential(state, coupling, beta, bank, activation);
    } else {
        sweep_kway(state, coupling, beta, bank, activation, ways);
    }
}

/// Random initial register contents for `seed`.
pub fn random_state(seed: &SeedBlock, n: usize) -> SpinState {
    let mut key = [0u8; 32];
    key.copy_from_slice(&seed.as_bytes()[..32]);
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(1);
    let mut state = SpinState::new(n, false);
    let mut word = 0u64;
    for i in 0..n {
        if i % 64 == 0 {
            word = rng.next_u64();
        }
        state.set_bit(i, word >> (i % 64) & 1 == 1);
    }
    state
}

/// A problem prepared for repeated trials: the coupling matrix is built once.
#[derive(Debug, Clone)]
pub struct PreparedProblem<'a> {
    problem: &'a MaxCutProblem,
    coupling: CouplingMatrix,
}

impl<'a> PreparedProblem<'a> {
    pub fn new(problem: &'a MaxCutProblem, n_m: Option<usize>) -> Result<Self, EngineError> {
        let n_m = n_m.unwrap_or(problem.n());
        if n_m == 0 || n_m > MAX_NODES {
            return Err(EngineError::PbitCount(n_m));
        }
        if problem.n() > n_m {
            return Err(EngineError::Capacity {
                nodes: problem.n(),
                capacity: n_m,
            });
        }
        let mut coupling = problem.to_coupling();
        if n_m > problem.n() {
            coupling = coupling.padded(n_m)?;
        }
        Ok(PreparedProblem { problem, coupling })
    }

    pub fn problem(&self) -> &MaxCutProblem {
        self.problem
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }

    pub fn n_m(&self) -> usize {
        self.coupling.n()
    }
}

pub fn run_trial(
    problem: &MaxCutProblem,
    cfg: &EngineConfig,
    sched: &AnnealSchedule,
) -> Result<TrialResult, EngineError> {
    let prepared = PreparedProblem::new(problem, cfg.n_m)?;
    run_prepared(&prepared, cfg, sched, |_, _| {})
}

/// Runs one trial, calling `observe(sample, state)` after every sample.
pub fn run_prepared<F>(
    prepared: &PreparedProblem<'_>,
    cfg: &EngineConfig,
    sched: &AnnealSchedule,
    mut observe: F,
) -> Result<TrialResult, EngineError>
where
    F: FnMut(u32, &SpinState),
{
    if cfg.ways == 0 || cfg.ways > MAX_WAYS {
        return Err(EngineError::Ways(cfg.ways));
    }
    if let Some(n_m) = cfg.n_m {
        if n_m != prepared.n_m() {
            return Err(EngineError::PbitCount(n_m));
        }
    }
    let problem = prepared.problem;
    let coupling = &prepared.coupling;
    let n = problem.n();
    let n_m = coupling.n();

    let mut state = match &cfg.initial_state {
        InitialState::Random => random_state(&cfg.seed, n_m),
        InitialState::Given(s) if s.len() == n => s.resized(n_m),
        InitialState::Given(s) if s.len() == n_m => s.clone(),
        InitialState::Given(s) => {
            return Err(EngineError::InitialState {
                expected: n,
                actual: s.len(),
            })
        }
    };
    let activation = Activation::new(cfg.activation);
    let mut bank = RngBank::from_seed(&cfg.seed, cfg.rng_ways)?;

    let view = |s: &SpinState| if n_m == n { s.clone() } else { s.resized(n) };
    let measure = |s: &SpinState| {
        let v = view(s);
        (problem.cut_value(&v), coupling.energy(s))
    };

    let (mut cut, mut energy) = measure(&state);
    let mut best = (cut, energy, 0u32, state.clone());
    let mut energy_trace = cfg.record_traces.then(Vec::new);
    let mut cut_trace = cfg.record_traces.then(Vec::new);
    let mut beta = sched.beta_initial;
    let mut saturated = false;

    for sample in 1..=sched.n_samples {
        sweep(&mut state, coupling, beta, &mut bank, &activation, cfg.ways);
        (cut, energy) = measure(&state);
        if let Some(t) = energy_trace.as_mut() {
            t.push(energy);
        }
        if let Some(t) = cut_trace.as_mut() {
            t.push(cut);
        }
        if cfg.track_best && cut > best.0 {
            best = (cut, energy, sample, state.clone());
        }
        observe(sample, &state);
        if sample < sched.n_samples {
            let next = anneal_step(beta, sched.beta_anneal_rate);
            saturated |= next.saturated;
            beta = next.value;
        }
    }
    if !cfg.track_best {
        best = (cut, energy, sched.n_samples, state.clone());
    }

    Ok(TrialResult {
        final_state: view(&state),
        final_cut: cut,
        final_energy: energy,
        best_state: view(&best.3),
        best_cut: best.0,
        best_energy: best.1,
        sample_at_best: best.2,
        energy_trace,
        cut_trace,
        cycles: trial_cycles(n_m, sched.n_samples as u64, cfg.ways),
        draws: bank.draws(),
        seed_used: cfg.seed,
        beta_saturated: saturated,
    })
}
