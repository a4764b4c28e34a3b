// SPDX-License-Identifier: Apache-2.0
//! Accelerator bookkeeping: the 32-bit instruction word, the J_Mem address
//! map and bank assignment, and the cycle/time model.
//!
//! Instruction layout (not taken from any published register map):
//!
//! ```text
//!  31  30 29  28 27          16 15              0
//! +------+------+--------------+-----------------+
//! |opcode| 0  0 |   N_m - 1    |       N_s       |
//! +------+------+--------------+-----------------+
//! ```

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::{decode_code, CouplingMatrix, ProblemError, CODE_ZERO, MAX_NODES};

pub const JMEM_ROWS: usize = 2048;
pub const JMEM_ROW_BITS: usize = 4096;
pub const JMEM_WORD_BITS: usize = 32;
pub const JMEM_WORDS_PER_ROW: usize = JMEM_ROW_BITS / JMEM_WORD_BITS;
pub const JMEM_ADDRESS_BITS: u32 = 18;
pub const JMEM_WORDS: usize = JMEM_ROWS * JMEM_WORDS_PER_ROW;
/// Coupling codes packed into one 32-bit configuration word.
pub const CODES_PER_WORD: usize = JMEM_WORD_BITS / 2;

/// Clock of the evaluated FPGA build.
pub const DEFAULT_CLOCK_HZ: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HwError {
    #[error("reserved instruction bits set in {0:#010x}")]
    ReservedBits(u32),
    #[error("{field} = {value} is out of range")]
    Range { field: &'static str, value: u64 },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Opcode {
    Configure = 0,
    Run = 1,
    ReadStatus = 2,
    Reset = 3,
}

impl Opcode {
    fn from_bits(bits: u32) -> Opcode {
        match bits & 0b11 {
            0 => Opcode::Configure,
            1 => Opcode::Run,
            2 => Opcode::ReadStatus,
            _ => Opcode::Reset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instruction {
    pub opcode: Opcode,
    /// `N_m - 1`, 12 bits.
    pub n_m_field: u16,
    pub n_s_field: u16,
}

impl Instruction {
    pub fn new(opcode: Opcode, n_m: usize, n_s: u32) -> Result<Self, HwError> {
        if n_m == 0 || n_m > MAX_NODES {
            return Err(HwError::Range {
                field: "n_m",
                value: n_m as u64,
            });
        }
        let n_s_field = u16::try_from(n_s).map_err(|_| HwError::Range {
            field: "n_s",
            value: n_s as u64,
        })?;
        Ok(Instruction {
            opcode,
            n_m_field: (n_m - 1) as u16,
            n_s_field,
        })
    }

    pub fn n_m(&self) -> usize {
        self.n_m_field as usize + 1
    }

    pub fn n_s(&self) -> u32 {
        self.n_s_field as u32
    }

    pub fn encode(&self) -> u32 {
        (self.opcode as u32) << 30 | ((self.n_m_field as u32) & 0xFFF) << 16 | self.n_s_field as u32
    }

    pub fn decode(word: u32) -> Result<Self, HwError> {
        if word >> 28 & 0b11 != 0 {
            return Err(HwError::ReservedBits(word));
        }
        Ok(Instruction {
            opcode: Opcode::from_bits(word >> 30),
            n_m_field: (word >> 16 & 0xFFF) as u16,
            n_s_field: (word & 0xFFFF) as u16,
        })
    }
}

/// 18-bit J_Mem word address of `(row, word)`.
pub fn jmem_address(row: usize, word: usize) -> Result<u32, HwError> {
    if row >= JMEM_ROWS {
        return Err(HwError::Range {
            field: "row",
            value: row as u64,
        });
    }
    if word >= JMEM_WORDS_PER_ROW {
        return Err(HwError::Range {
            field: "word",
            value: word as u64,
        });
    }
    Ok((row * JMEM_WORDS_PER_ROW + word) as u32)
}

pub fn jmem_location(address: u32) -> Result<(usize, usize), HwError> {
    if address as usize >= JMEM_WORDS {
        return Err(HwError::Range {
            field: "address",
            value: address as u64,
        });
    }
    let a = address as usize;
    Ok((a / JMEM_WORDS_PER_ROW, a % JMEM_WORDS_PER_ROW))
}

/// Row-interleaved banking: any `ways` consecutive rows sit in distinct banks.
pub fn bank_of_row(row: usize, ways: usize) -> usize {
    assert!(ways > 0);
    row % ways
}

/// The 8 Mb coupling memory, written and read in 32-bit words.
#[derive(Clone, PartialEq, Eq)]
pub struct JMem {
    words: Vec<u32>,
}

impl Default for JMem {
    fn default() -> Self {
        JMem {
            words: vec![0; JMEM_WORDS],
        }
    }
}

impl std::fmt::Debug for JMem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let used = self.words.iter().filter(|&&w| w != 0).count();
        write!(f, "JMem {{ nonzero_words: {used} }}")
    }
}

impl JMem {
    pub fn new() -> Self {
        JMem::default()
    }

    pub fn write(&mut self, address: u32, word: u32) -> Result<(), HwError> {
        jmem_location(address)?;
        self.words[address as usize] = word;
        Ok(())
    }

    pub fn read(&self, address: u32) -> Result<u32, HwError> {
        jmem_location(address)?;
        Ok(self.words[address as usize])
    }

    /// One full row as 2048 2-bit codes.
    pub fn read_row(&self, row: usize) -> Result<Vec<u8>, HwError> {
        let base = jmem_address(row, 0)? as usize;
        Ok(self.words[base..base + JMEM_WORDS_PER_ROW]
            .iter()
            .flat_map(|&w| (0..CODES_PER_WORD).map(move |c| (w >> (2 * c) & 0b11) as u8))
            .collect())
    }

    /// Reassembles the leading `n x n` block as a coupling matrix.
    pub fn to_coupling(&self, n: usize) -> Result<CouplingMatrix, HwError> {
        if n == 0 || n > JMEM_ROWS {
            return Err(HwError::Range {
                field: "n",
                value: n as u64,
            });
        }
        let mut codes = Vec::with_capacity(n * n);
        for row in 0..n {
            let full = self.read_row(row)?;
            for &code in &full[..n] {
                decode_code(code)?;
            }
            codes.extend_from_slice(&full[..n]);
        }
        Ok(CouplingMatrix::from_codes(n, codes, vec![0; n])?)
    }
}

/// The `(address, word)` writes that configure `matrix`, skipping all-zero words.
pub fn configuration_writes(matrix: &CouplingMatrix) -> Vec<(u32, u32)> {
    let n = matrix.n();
    let mut writes = Vec::new();
    for row in 0..n {
        let codes = matrix.row_codes(row);
        for (word, chunk) in codes.chunks(CODES_PER_WORD).enumerate() {
            let value = chunk
                .iter()
                .enumerate()
                .fold(0u32, |acc, (c, &code)| acc | (code as u32) << (2 * c));
            if value != CODE_ZERO as u32 {
                let address = jmem_address(row, word).expect("n <= 2048");
                writes.push((address, value));
            }
        }
    }
    writes
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialTiming {
    pub cycles: u64,
    pub seconds: f64,
    /// Exact when the clock period is a whole number of nanoseconds.
    pub nanos: u128,
}

impl TrialTiming {
    pub fn duration(&self) -> Duration {
        Duration::from_nanos(self.nanos as u64)
    }
}

/// `ceil(n_m / ways)` update cycles plus one overhead cycle per sample.
pub fn trial_cycles(n_m: usize, n_s: u64, ways: usize) -> u64 {
    assert!(ways > 0);
    (n_m.div_ceil(ways) as u64 + 1) * n_s
}

pub fn cycles_and_time(n_m: usize, n_s: u64, ways: usize, clock_hz: u64) -> TrialTiming {
    assert!(clock_hz > 0);
    let cycles = trial_cycles(n_m, n_s, ways);
    TrialTiming {
        cycles,
        seconds: cycles as f64 / clock_hz as f64,
        nanos: cycles as u128 * 1_000_000_000 / clock_hz as u128,
    }
}
