// SPDX-License-Identifier: Apache-2.0
//! p-bit stochasticity: 21-bit Fibonacci LFSRs read as signed Q0.20 values.
//!
//! The register shifts left by one bit per draw. The feedback bit is the XOR
//! of tap positions 21 and 19 (1-based, i.e. bits 20 and 18), which gives the
//! maximal-length polynomial x^21 + x^19 + 1. After each shift the whole
//! register is read as a two's-complement Q0.20 number in [-1, 1 - 2^-20].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixedpoint::{FixedQ, QFormat};

pub const LFSR_BITS: u32 = 21;
pub const LFSR_MASK: u32 = (1 << LFSR_BITS) - 1;
/// Feedback taps, 1-based bit positions.
pub const LFSR_TAPS: [u32; 2] = [21, 19];
pub const LFSR_PERIOD: u64 = (1 << LFSR_BITS) - 1;

pub const SEED_BITS: usize = 512;
pub const SEED_BYTES: usize = SEED_BITS / 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RngError {
    #[error("LFSR state must be a nonzero 21-bit value, got {0:#x}")]
    InvalidState(u32),
    #[error("{ways}-way bank needs {needed} seed bits but only {SEED_BITS} are available")]
    InsufficientSeedBits { ways: u32, needed: usize },
    #[error("way count must be at least 1")]
    ZeroWays,
    #[error("seed must be exactly 128 hex digits, got {0}")]
    SeedLength(usize),
    #[error("seed is not valid hex: {0}")]
    SeedHex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lfsr21 {
    state: u32,
}

impl Lfsr21 {
    pub fn new(state: u32) -> Result<Self, RngError> {
        if state == 0 || state & !LFSR_MASK != 0 {
            return Err(RngError::InvalidState(state));
        }
        Ok(Lfsr21 { state })
    }

    pub fn state(self) -> u32 {
        self.state
    }

    pub fn step(&mut self) {
        let s = self.state;
        let feedback = ((s >> (LFSR_TAPS[0] - 1)) ^ (s >> (LFSR_TAPS[1] - 1))) & 1;
        self.state = ((s << 1) | feedback) & LFSR_MASK;
    }

    /// Current register contents as signed Q0.20 raw units.
    pub fn value_raw(self) -> i64 {
        state_to_raw(self.state)
    }

    pub fn value(self) -> FixedQ {
        FixedQ::from_raw(self.value_raw(), QFormat::Q0_20).expect("21-bit value fits Q0.20")
    }

    /// Advances once and returns the new state as raw Q0.20.
    pub fn draw_raw(&mut self) -> i64 {
        self.step();
        self.value_raw()
    }

    pub fn draw(&mut self) -> FixedQ {
        self.step();
        self.value()
    }
}

/// Sign-extends a 21-bit register into Q0.20 raw units.
pub fn state_to_raw(state: u32) -> i64 {
    (((state << (32 - LFSR_BITS)) as i32) >> (32 - LFSR_BITS)) as i64
}

/// The 512-bit seed port. Bit 0 is the least significant bit of the number
/// written as 128 hex digits.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedBlock([u8; SEED_BYTES]);

impl SeedBlock {
    pub fn from_bytes(bytes: [u8; SEED_BYTES]) -> Self {
        SeedBlock(bytes)
    }

    /// Low 64 bits set to `value`, the rest zero. Handy for tests, but LFSR
    /// slots past the third all start from 1 and run in lockstep.
    pub fn from_u64(value: u64) -> Self {
        let mut bytes = [0u8; SEED_BYTES];
        bytes[SEED_BYTES - 8..].copy_from_slice(&value.to_be_bytes());
        SeedBlock(bytes)
    }

    pub fn from_hex(text: &str) -> Result<Self, RngError> {
        let text = text.trim();
        if text.len() != SEED_BYTES * 2 {
            return Err(RngError::SeedLength(text.len()));
        }
        let mut bytes = [0u8; SEED_BYTES];
        hex::decode_to_slice(text, &mut bytes).map_err(|e| RngError::SeedHex(e.to_string()))?;
        Ok(SeedBlock(bytes))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn as_bytes(&self) -> &[u8; SEED_BYTES] {
        &self.0
    }

    pub fn bit(&self, index: usize) -> bool {
        assert!(index < SEED_BITS);
        self.0[SEED_BYTES - 1 - index / 8] >> (index % 8) & 1 == 1
    }

    /// Bits `[21*slot + 20 : 21*slot]`.
    pub fn slice21(&self, slot: usize) -> u32 {
        (0..LFSR_BITS as usize).fold(0u32, |acc, b| {
            acc | (self.bit(slot * LFSR_BITS as usize + b) as u32) << b
        })
    }
}

impl fmt::Debug for SeedBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeedBlock({})", self.to_hex())
    }
}

impl fmt::Display for SeedBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for SeedBlock {
    type Err = RngError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SeedBlock::from_hex(s)
    }
}

impl Serialize for SeedBlock {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for SeedBlock {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        SeedBlock::from_hex(&text).map_err(serde::de::Error::custom)
    }
}

/// Number of LFSRs a `ways`-way update core carries: one per speculative unit.
pub fn lfsrs_for_ways(ways: u32) -> usize {
    (1usize << ways) - 1
}

/// Slices the seed into consecutive 21-bit windows, one per LFSR. Zero
/// windows are replaced by 1 so every register starts nonzero.
pub fn expand_seed(seed: &SeedBlock, ways: u32) -> Result<Vec<Lfsr21>, RngError> {
    if ways == 0 {
        return Err(RngError::ZeroWays);
    }
    let needed = if ways >= usize::BITS - 1 {
        usize::MAX
    } else {
        lfsrs_for_ways(ways) * LFSR_BITS as usize
    };
    if needed > SEED_BITS {
        return Err(RngError::InsufficientSeedBits { ways, needed });
    }
    Ok((0..lfsrs_for_ways(ways))
        .map(|slot| match seed.slice21(slot) {
            0 => Lfsr21 { state: 1 },
            state => Lfsr21 { state },
        })
        .collect())
}

/// A set of LFSRs where p-bit position `i` always draws from LFSR
/// `i mod len`. Draws are consumed in ascending position order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngBank {
    lfsrs: Vec<Lfsr21>,
    draws: u64,
}

impl RngBank {
    pub fn new(lfsrs: Vec<Lfsr21>) -> Self {
        assert!(!lfsrs.is_empty(), "bank needs at least one LFSR");
        RngBank { lfsrs, draws: 0 }
    }

    pub fn from_seed(seed: &SeedBlock, ways: u32) -> Result<Self, RngError> {
        Ok(RngBank::new(expand_seed(seed, ways)?))
    }

    pub fn len(&self) -> usize {
        self.lfsrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lfsrs.is_empty()
    }

    pub fn lfsrs(&self) -> &[Lfsr21] {
        &self.lfsrs
    }

    /// Raw Q0.20 draw for p-bit `position`.
    pub fn draw_raw(&mut self, position: usize) -> i64 {
        self.draws += 1;
        let n = self.lfsrs.len();
        self.lfsrs[position % n].draw_raw()
    }

    pub fn draw(&mut self, position: usize) -> FixedQ {
        FixedQ::from_raw(self.draw_raw(position), QFormat::Q0_20).expect("draw fits Q0.20")
    }

    /// Total draws consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}
