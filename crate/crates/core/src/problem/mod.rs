// SPDX-License-Identifier: Apache-2.0
//! Max-cut instances and their p-bit encoding.
//!
//! A graph with edge weights `w_ij` in {-1, +1} maps to couplings
//! `J_ij = -w_ij` with zero bias. Couplings are stored as 2-bit codes
//! (`00` = 0, `01` = +1, `11` = -1), spins as one bit each (`0` = -1,
//! `1` = +1).

mod gset;
pub mod registry;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gset::parse_gset;
pub use registry::{
    benchmark, BestKnownRegistry, GraphKind, GraphRecord, RegistryError, BENCHMARKS,
};

/// Accelerator capacity in p-bits.
pub const MAX_NODES: usize = 2048;

pub const CODE_ZERO: u8 = 0b00;
pub const CODE_PLUS: u8 = 0b01;
pub const CODE_MINUS: u8 = 0b11;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    Range { line: usize, message: String },
    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },
    #[error("graph has {0} nodes; the accelerator holds at most {MAX_NODES}")]
    TooLarge(usize),
    #[error("graph must have at least one node")]
    Empty,
    #[error("2-bit coupling code {0:#04b} is not a valid encoding")]
    InvalidCode(u8),
    #[error("coupling matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("reading graph: {0}")]
    Io(String),
}

/// Decodes a 2-bit coupling code into {-1, 0, +1}.
pub fn decode_code(code: u8) -> Result<i8, ProblemError> {
    match code {
        CODE_ZERO => Ok(0),
        CODE_PLUS => Ok(1),
        CODE_MINUS => Ok(-1),
        other => Err(ProblemError::InvalidCode(other)),
    }
}

pub fn encode_coupling(value: i8) -> Option<u8> {
    match value {
        0 => Some(CODE_ZERO),
        1 => Some(CODE_PLUS),
        -1 => Some(CODE_MINUS),
        _ => None,
    }
}

/// `J_ij * m_j` from a coupling code and a spin bit.
pub fn jm_product(code: u8, spin_bit: bool) -> Result<i8, ProblemError> {
    let j = decode_code(code)?;
    Ok(if spin_bit { j } else { -j })
}

/// Undirected weighted edge, 0-based, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxCutProblem {
    name: String,
    n: usize,
    edges: Vec<Edge>,
}

impl MaxCutProblem {
    /// Builds a problem from 0-based `(i, j, w)` triples. Endpoints are
    /// normalized to `i < j`.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, i8)>,
    ) -> Result<Self, ProblemError> {
        check_size(n)?;
        let mut seen = HashSet::new();
        let mut stored = Vec::new();
        for (idx, (a, b, w)) in edges.into_iter().enumerate() {
            let edge = make_edge(n, a, b, w).map_err(|message| ProblemError::Range {
                line: idx + 1,
                message,
            })?;
            if !seen.insert((edge.i, edge.j)) {
                return Err(ProblemError::DuplicateEdge {
                    i: edge.i,
                    j: edge.j,
                });
            }
            stored.push(edge);
        }
        Ok(MaxCutProblem {
            name: name.into(),
            n,
            edges: stored,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> i64 {
        self.edges.iter().map(|e| e.w as i64).sum()
    }

    /// Sum of `w_ij` over edges whose endpoints have opposite spins.
    pub fn cut_value(&self, state: &SpinState) -> i64 {
        assert_eq!(state.len(), self.n, "state size must match graph");
        self.edges
            .iter()
            .filter(|e| state.bit(e.i) != state.bit(e.j))
            .map(|e| e.w as i64)
            .sum()
    }

    /// `sum w_ij m_i m_j`, which equals the Ising energy under `J = -w`.
    pub fn ising_energy(&self, state: &SpinState) -> i64 {
        assert_eq!(state.len(), self.n, "state size must match graph");
        self.edges
            .iter()
            .map(|e| (e.w * state.spin(e.i) * state.spin(e.j)) as i64)
            .sum()
    }

    pub fn to_coupling(&self) -> CouplingMatrix {
        let mut codes = vec![CODE_ZERO; self.n * self.n];
        for e in &self.edges {
            let code = encode_coupling(-e.w).expect("weights are +-1");
            codes[e.i * self.n + e.j] = code;
            codes[e.j * self.n + e.i] = code;
        }
        CouplingMatrix::from_codes_unchecked(self.n, codes, vec![0; self.n])
    }
}

fn check_size(n: usize) -> Result<(), ProblemError> {
    match n {
        0 => Err(ProblemError::Empty),
        n if n > MAX_NODES => Err(ProblemError::TooLarge(n)),
        _ => Ok(()),
    }
}

fn make_edge(n: usize, a: usize, b: usize, w: i8) -> Result<Edge, String> {
    if a >= n || b >= n {
        return Err(format!("edge ({a}, {b}) references a node outside 0..{n}"));
    }
    if a == b {
        return Err(format!("self loop on node {a}"));
    }
    if w != 1 && w != -1 {
        return Err(format!("weight {w} is not -1 or +1"));
    }
    Ok(Edge {
        i: a.min(b),
        j: a.max(b),
        w,
    })
}

/// Packed spin register; bit `i` set means spin `+1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinState {
    n: usize,
    words: Vec<u64>,
}

impl SpinState {
    pub fn new(n: usize, up: bool) -> Self {
        let mut s = SpinState {
            n,
            words: vec![if up { u64::MAX } else { 0 }; n.div_ceil(64)],
        };
        s.clear_padding();
        s
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = SpinState::new(bits.len(), false);
        for (i, &b) in bits.iter().enumerate() {
            s.set_bit(i, b);
        }
        s
    }

    /// Panics on values other than -1 and +1.
    pub fn from_spins(spins: &[i8]) -> Self {
        let mut s = SpinState::new(spins.len(), false);
        for (i, &m) in spins.iter().enumerate() {
            assert!(m == 1 || m == -1, "spin must be +-1, got {m}");
            s.set_bit(i, m == 1);
        }
        s
    }

    /// Bit `i` of state `index` for `index < 2^n`; used for enumeration.
    pub fn from_index(n: usize, index: u64) -> Self {
        let mut s = SpinState::new(n, false);
        for i in 0..n {
            s.set_bit(i, index >> i & 1 == 1);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.n);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn spin(&self, i: usize) -> i8 {
        if self.bit(i) {
            1
        } else {
            -1
        }
    }

    pub fn set_bit(&mut self, i: usize, up: bool) {
        assert!(i < self.n);
        let mask = 1u64 << (i % 64);
        if up {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn spins(&self) -> impl Iterator<Item = i8> + '_ {
        (0..self.n).map(|i| self.spin(i))
    }

    /// Grows or shrinks the register; new positions start at -1.
    pub fn resized(&self, n: usize) -> SpinState {
        let mut s = SpinState::new(n, false);
        for i in 0..n.min(self.n) {
            s.set_bit(i, self.bit(i));
        }
        s
    }

    /// '0'/'1' per position, position 0 first.
    pub fn to_bit_string(&self) -> String {
        (0..self.n)
            .map(|i| if self.bit(i) { '1' } else { '0' })
            .collect()
    }

    fn clear_padding(&mut self) {
        let rem = self.n % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinState({})", self.to_bit_string())
    }
}

/// Dense symmetric coupling matrix of 2-bit codes plus integer biases.
///
/// Alongside the codes it keeps two bit planes per row: `nonzero` (code bit 0)
/// and `negative` (code bit 1). A product `J_ij * m_j` is +1 exactly when the
/// coupling is nonzero and `negative XOR m_j` holds, so a row sum is two
/// popcounts per 64 columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMatrix {
    n: usize,
    codes: Vec<u8>,
    bias: Vec<i32>,
    words_per_row: usize,
    nonzero: Vec<u64>,
    negative: Vec<u64>,
    row_degree: Vec<i32>,
}

impl CouplingMatrix {
    /// Validates codes (no `10`, zero diagonal, symmetric).
    pub fn from_codes(n: usize, codes: Vec<u8>, bias: Vec<i32>) -> Result<Self, ProblemError> {
        check_size(n)?;
        if codes.len() != n * n {
            return Err(ProblemError::Dimension {
                expected: n * n,
                actual: codes.len(),
            });
        }
        if bias.len() != n {
            return Err(ProblemError::Dimension {
                expected: n,
                actual: bias.len(),
            });
        }
        for i in 0..n {
            if codes[i * n + i] != CODE_ZERO {
                return Err(ProblemError::Asymmetric(i, i));
            }
            for j in 0..n {
                decode_code(codes[i * n + j])?;
                if codes[i * n + j] != codes[j * n + i] {
                    return Err(ProblemError::Asymmetric(i, j));
                }
            }
        }
        Ok(CouplingMatrix::from_codes_unchecked(n, codes, bias))
    }

    /// Builds from a dense {-1, 0, +1} matrix given row by row.
    pub fn from_dense(n: usize, values: &[i8], bias: Vec<i32>) -> Result<Self, ProblemError> {
        let codes = values
            .iter()
            .map(|&v| {
                encode_coupling(v).ok_or(ProblemError::Range {
                    line: 0,
                    message: format!("coupling {v} is not -1, 0 or +1"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        CouplingMatrix::from_codes(n, codes, bias)
    }

    fn from_codes_unchecked(n: usize, codes: Vec<u8>, bias: Vec<i32>) -> Self {
        let words_per_row = n.div_ceil(64);
        let mut nonzero = vec![0u64; n * words_per_row];
        let mut negative = vec![0u64; n * words_per_row];
        let mut row_degree = vec![0i32; n];
        for i in 0..n {
            for j in 0..n {
                let code = codes[i * n + j];
                let word = i * words_per_row + j / 64;
                if code & 1 == 1 {
                    nonzero[word] |= 1 << (j % 64);
                    row_degree[i] += 1;
                }
                if code & 2 == 2 {
                    negative[word] |= 1 << (j % 64);
                }
            }
        }
        CouplingMatrix {
            n,
            codes,
            bias,
            words_per_row,
            nonzero,
            negative,
            row_degree,
        }
    }

    pub fn with_bias(mut self, bias: Vec<i32>) -> Result<Self, ProblemError> {
        if bias.len() != self.n {
            return Err(ProblemError::Dimension {
                expected: self.n,
                actual: bias.len(),
            });
        }
        self.bias = bias;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn code(&self, i: usize, j: usize) -> u8 {
        self.codes[i * self.n + j]
    }

    pub fn coupling(&self, i: usize, j: usize) -> i8 {
        decode_code(self.code(i, j)).expect("stored codes are valid")
    }

    pub fn bias(&self, i: usize) -> i32 {
        self.bias[i]
    }

    pub fn row_codes(&self, i: usize) -> &[u8] {
        &self.codes[i * self.n..(i + 1) * self.n]
    }

    /// Grows the matrix to `n` p-bits; added rows and columns are zero.
    pub fn padded(&self, n: usize) -> Result<Self, ProblemError> {
        check_size(n)?;
        if n < self.n {
            return Err(ProblemError::Dimension {
                expected: self.n,
                actual: n,
            });
        }
        let mut codes = vec![CODE_ZERO; n * n];
        for i in 0..self.n {
            codes[i * n..i * n + self.n].copy_from_slice(self.row_codes(i));
        }
        let mut bias = self.bias.clone();
        bias.resize(n, 0);
        Ok(CouplingMatrix::from_codes_unchecked(n, codes, bias))
    }

    /// `h_i + sum_j J_ij m_j`.
    pub fn row_sum(&self, i: usize, state: &SpinState) -> i32 {
        debug_assert_eq!(state.len(), self.n);
        let row = i * self.words_per_row;
        let nz = &self.nonzero[row..row + self.words_per_row];
        let neg = &self.negative[row..row + self.words_per_row];
        let positive: u32 = nz
            .iter()
            .zip(neg)
            .zip(state.words())
            .map(|((&z, &g), &m)| (z & (g ^ m)).count_ones())
            .sum();
        self.bias[i] + 2 * positive as i32 - self.row_degree[i]
    }

    /// `E = -(sum_{i<j} J_ij m_i m_j + sum_i h_i m_i)`.
    pub fn energy(&self, state: &SpinState) -> i64 {
        assert_eq!(state.len(), self.n, "state size must match matrix");
        let mut pair = 0i64;
        let mut field = 0i64;
        for i in 0..self.n {
            let m = state.spin(i) as i64;
            let h = self.bias[i] as i64;
            pair += m * (self.row_sum(i, state) as i64 - h);
            field += m * h;
        }
        // each pair appears twice in the row sums
        -(pair / 2 + field)
    }
}
