// SPDX-License-Identifier: Apache-2.0
//! Activation functions applied to the local field before the comparator.
//!
//! Piece-wise-linear `A_T` clamps its input to `[-T, +T]` and divides by `T`
//! with an arithmetic right shift. The two lookup-table variants hold 1024
//! Q1.20 samples of `tanh` or `2*sigmoid - 1` over `[-4, +4]`, one per
//! uniform bin, sampled at the bin centers.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixedpoint::{FixedQ, QFormat, Rounding};

/// Fractional bits of the activation datapath.
pub const FRAC_BITS: u32 = 20;
pub const ONE: i64 = 1 << FRAC_BITS;
pub const LUT_ENTRIES: usize = 1024;
pub const LUT_THRESHOLD: u32 = 4;
/// log2 of the LUT bin width in raw units: 8 / 1024 = 2^-7.
const LUT_BIN_SHIFT: u32 = FRAC_BITS - 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActivationError {
    #[error("{0} is not a lookup-table activation")]
    NotALut(ActivationKind),
    #[error("unknown activation {0:?} (expected pwl1, pwl2, pwl4, lut-tanh or lut-sigmoid)")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ActivationKind {
    LutTanh,
    LutSigmoid2m1,
    #[default]
    PwlA1,
    PwlA2,
    PwlA4,
}

impl ActivationKind {
    pub const ALL: [ActivationKind; 5] = [
        ActivationKind::LutTanh,
        ActivationKind::LutSigmoid2m1,
        ActivationKind::PwlA1,
        ActivationKind::PwlA2,
        ActivationKind::PwlA4,
    ];

    pub fn threshold(self) -> u32 {
        match self {
            ActivationKind::PwlA1 => 1,
            ActivationKind::PwlA2 => 2,
            ActivationKind::LutTanh | ActivationKind::LutSigmoid2m1 | ActivationKind::PwlA4 => 4,
        }
    }

    pub fn is_lut(self) -> bool {
        matches!(
            self,
            ActivationKind::LutTanh | ActivationKind::LutSigmoid2m1
        )
    }

    pub fn cli_name(self) -> &'static str {
        match self {
            ActivationKind::LutTanh => "lut-tanh",
            ActivationKind::LutSigmoid2m1 => "lut-sigmoid",
            ActivationKind::PwlA1 => "pwl1",
            ActivationKind::PwlA2 => "pwl2",
            ActivationKind::PwlA4 => "pwl4",
        }
    }

    /// The real-valued function the variant approximates.
    pub fn reference(self, x: f64) -> f64 {
        match self {
            ActivationKind::LutTanh => x.tanh(),
            ActivationKind::LutSigmoid2m1 => 2.0 / (1.0 + (-x).exp()) - 1.0,
            _ => {
                let t = self.threshold() as f64;
                x.clamp(-t, t) / t
            }
        }
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for ActivationKind {
    type Err = ActivationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActivationKind::ALL
            .into_iter()
            .find(|k| k.cli_name() == s)
            .ok_or_else(|| ActivationError::Unknown(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LutTable {
    kind: ActivationKind,
    entries: Vec<i64>,
}

impl LutTable {
    pub fn build(kind: ActivationKind) -> Result<Self, ActivationError> {
        if !kind.is_lut() {
            return Err(ActivationError::NotALut(kind));
        }
        let entries = (0..LUT_ENTRIES)
            .map(|j| {
                let y = kind.reference(LutTable::bin_center(j));
                FixedQ::from_real(y, QFormat::Q1_20)
                    .expect("activation output within [-1, 1]")
                    .raw()
            })
            .collect();
        Ok(LutTable { kind, entries })
    }

    /// Input value at the middle of bin `j`.
    pub fn bin_center(j: usize) -> f64 {
        let t = LUT_THRESHOLD as f64;
        -t + (j as f64 + 0.5) * (2.0 * t / LUT_ENTRIES as f64)
    }

    pub fn kind(&self) -> ActivationKind {
        self.kind
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// Bin of a raw 20-fractional-bit input. The magnitude picks the bin and
    /// the sign mirrors it, so `x` and `-x` land on mirrored entries.
    pub fn index(raw: i64) -> usize {
        let half = LUT_ENTRIES / 2;
        let limit = (LUT_THRESHOLD as i64) << FRAC_BITS;
        let bin = ((raw.unsigned_abs().min(limit as u64) >> LUT_BIN_SHIFT) as usize).min(half - 1);
        if raw >= 0 {
            half + bin
        } else {
            half - 1 - bin
        }
    }

    pub fn lookup(&self, raw: i64) -> i64 {
        self.entries[LutTable::index(raw)]
    }
}

/// An activation variant ready to evaluate. LUT variants share their table.
#[derive(Debug, Clone)]
pub struct Activation {
    kind: ActivationKind,
    lut: Option<Arc<LutTable>>,
}

impl Activation {
    pub fn new(kind: ActivationKind) -> Self {
        let lut = kind
            .is_lut()
            .then(|| Arc::new(LutTable::build(kind).expect("kind is a LUT")));
        Activation { kind, lut }
    }

    pub fn kind(&self) -> ActivationKind {
        self.kind
    }

    pub fn table(&self) -> Option<&LutTable> {
        self.lut.as_deref()
    }

    /// Maps a raw input with 20 fractional bits to a raw Q1.20 output.
    pub fn evaluate_raw(&self, raw: i64) -> i64 {
        match &self.lut {
            Some(table) => table.lookup(raw),
            None => {
                let t = self.kind.threshold();
                let limit = (t as i64) << FRAC_BITS;
                raw.clamp(-limit, limit) >> t.trailing_zeros()
            }
        }
    }

    /// Inputs with more than 20 fractional bits are floored to 20 first.
    pub fn evaluate(&self, input: FixedQ) -> FixedQ {
        let raw = if input.format().fractional_bits() == FRAC_BITS {
            input.raw()
        } else {
            let wide = QFormat::new(63 - FRAC_BITS, FRAC_BITS).expect("64-bit format");
            input.convert(wide, Rounding::Floor).value.raw()
        };
        FixedQ::from_raw(self.evaluate_raw(raw), QFormat::Q1_20).expect("output within [-1, 1]")
    }
}
