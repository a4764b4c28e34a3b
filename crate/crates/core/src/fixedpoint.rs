// SPDX-License-Identifier: Apache-2.0
//! Two's-complement fixed-point values with explicit bit widths.
//!
//! A [`QFormat`] `Qi.f` carries one sign bit, `i` integer bits and `f`
//! fractional bits, so the raw integer `r` stands for `r / 2^f`. The formats
//! used by the datapath are Q4.20 (inverse temperature), Q1.20 (activation
//! output), Q0.20 (LFSR draw) and Q2.20 (comparator input).
//!
//! Products drop their low bits toward negative infinity unless a rounding
//! mode is requested explicitly. Results that do not fit their output format
//! saturate, and the saturation is reported alongside the value.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixedError {
    #[error("format Q{integer_bits}.{fractional_bits} is wider than 64 bits")]
    FormatTooWide {
        integer_bits: u32,
        fractional_bits: u32,
    },
    #[error("{value} is not representable in {format}")]
    Overflow { value: f64, format: QFormat },
    #[error("raw value {raw} does not fit in {format}")]
    RawOutOfRange { raw: i128, format: QFormat },
}

/// Signed fixed-point layout: sign bit, integer bits, fractional bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QFormat {
    integer_bits: u8,
    fractional_bits: u8,
}

impl QFormat {
    /// Inverse pseudo-temperature and anneal rate.
    pub const Q4_20: QFormat = QFormat::unchecked(4, 20);
    /// Activation output, range [-1, +1].
    pub const Q1_20: QFormat = QFormat::unchecked(1, 20);
    /// LFSR draw, range [-1, 1 - 2^-20].
    pub const Q0_20: QFormat = QFormat::unchecked(0, 20);
    /// Comparator input: activation output plus draw.
    pub const Q2_20: QFormat = QFormat::unchecked(2, 20);

    const fn unchecked(integer_bits: u8, fractional_bits: u8) -> Self {
        QFormat {
            integer_bits,
            fractional_bits,
        }
    }

    pub const fn new(integer_bits: u32, fractional_bits: u32) -> Result<Self, FixedError> {
        if 1 + integer_bits as u64 + fractional_bits as u64 > 64 {
            return Err(FixedError::FormatTooWide {
                integer_bits,
                fractional_bits,
            });
        }
        Ok(QFormat::unchecked(
            integer_bits as u8,
            fractional_bits as u8,
        ))
    }

    /// Pure integer format `Qi.0`.
    pub fn integer(integer_bits: u32) -> Result<Self, FixedError> {
        QFormat::new(integer_bits, 0)
    }

    pub fn integer_bits(self) -> u32 {
        self.integer_bits as u32
    }

    pub fn fractional_bits(self) -> u32 {
        self.fractional_bits as u32
    }

    pub fn width(self) -> u32 {
        1 + self.integer_bits() + self.fractional_bits()
    }

    pub fn max_raw(self) -> i64 {
        ((1i128 << (self.width() - 1)) - 1) as i64
    }

    pub fn min_raw(self) -> i64 {
        (-(1i128 << (self.width() - 1))) as i64
    }

    /// Weight of the least significant bit.
    pub fn ulp(self) -> f64 {
        (-(self.fractional_bits() as f64)).exp2()
    }

    pub fn contains(self, raw: i128) -> bool {
        raw >= self.min_raw() as i128 && raw <= self.max_raw() as i128
    }

    fn saturate(self, raw: i128) -> (i64, bool) {
        if raw > self.max_raw() as i128 {
            (self.max_raw(), true)
        } else if raw < self.min_raw() as i128 {
            (self.min_raw(), true)
        } else {
            (raw as i64, false)
        }
    }
}

impl fmt::Display for QFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}.{}", self.integer_bits, self.fractional_bits)
    }
}

/// How dropped low-order bits are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Rounding {
    #[default]
    HalfAwayFromZero,
    /// Add half an output LSB, then floor.
    HalfUp,
    /// Toward zero.
    Truncate,
    /// Toward negative infinity; what dropping bits of a two's-complement word does.
    Floor,
}

/// A result together with whether it had to be clamped into its format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Saturating<T> {
    pub value: T,
    pub saturated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedQ {
    raw: i64,
    format: QFormat,
}

impl FixedQ {
    pub fn from_raw(raw: i64, format: QFormat) -> Result<Self, FixedError> {
        if !format.contains(raw as i128) {
            return Err(FixedError::RawOutOfRange {
                raw: raw as i128,
                format,
            });
        }
        Ok(FixedQ { raw, format })
    }

    pub fn from_raw_saturating(raw: i128, format: QFormat) -> Saturating<Self> {
        let (raw, saturated) = format.saturate(raw);
        Saturating {
            value: FixedQ { raw, format },
            saturated,
        }
    }

    pub fn zero(format: QFormat) -> Self {
        FixedQ { raw: 0, format }
    }

    pub fn max(format: QFormat) -> Self {
        FixedQ {
            raw: format.max_raw(),
            format,
        }
    }

    pub fn min(format: QFormat) -> Self {
        FixedQ {
            raw: format.min_raw(),
            format,
        }
    }

    /// Quantizes `x` with round-half-away-from-zero.
    pub fn from_real(x: f64, format: QFormat) -> Result<Self, FixedError> {
        FixedQ::from_real_with(x, format, Rounding::default())
    }

    pub fn from_real_with(x: f64, format: QFormat, mode: Rounding) -> Result<Self, FixedError> {
        let overflow = FixedError::Overflow { value: x, format };
        if !x.is_finite() {
            return Err(overflow);
        }
        // Scaling by a power of two is exact in binary floating point.
        let scaled = x * (format.fractional_bits() as f64).exp2();
        let rounded = match mode {
            Rounding::HalfAwayFromZero => scaled.round(),
            Rounding::HalfUp => (scaled + 0.5).floor(),
            Rounding::Truncate => scaled.trunc(),
            Rounding::Floor => scaled.floor(),
        };
        if rounded.abs() >= 2f64.powi(64) {
            return Err(overflow);
        }
        let raw = rounded as i128;
        if !format.contains(raw) {
            return Err(overflow);
        }
        Ok(FixedQ {
            raw: raw as i64,
            format,
        })
    }

    pub fn raw(self) -> i64 {
        self.raw
    }

    pub fn format(self) -> QFormat {
        self.format
    }

    pub fn to_real(self) -> f64 {
        self.raw as f64 * (-(self.format.fractional_bits() as f64)).exp2()
    }

    /// Exact wide product, low bits floored away, saturated into `out`.
    pub fn mul(self, other: FixedQ, out: QFormat) -> Saturating<FixedQ> {
        self.mul_rounded(other, out, Rounding::Floor)
    }

    pub fn mul_rounded(self, other: FixedQ, out: QFormat, mode: Rounding) -> Saturating<FixedQ> {
        let product = self.raw as i128 * other.raw as i128;
        let frac = self.format.fractional_bits() as i32 + other.format.fractional_bits() as i32;
        let shift = frac - out.fractional_bits() as i32;
        let raw = rescale(product, shift, mode);
        FixedQ::from_raw_saturating(raw, out)
    }

    /// Sum in the operands' common format widened by one integer bit, so two
    /// Q1.20 values add into Q2.20 without overflow.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: FixedQ) -> Saturating<FixedQ> {
        let frac = self
            .format
            .fractional_bits()
            .max(other.format.fractional_bits());
        let int = (self.format.integer_bits().max(other.format.integer_bits()) + 1).min(63 - frac);
        let out = QFormat::unchecked(int as u8, frac as u8);
        let a = rescale(
            self.raw as i128,
            self.format.fractional_bits() as i32 - frac as i32,
            Rounding::Floor,
        );
        let b = rescale(
            other.raw as i128,
            other.format.fractional_bits() as i32 - frac as i32,
            Rounding::Floor,
        );
        FixedQ::from_raw_saturating(a + b, out)
    }

    /// Re-expresses the value in another format.
    pub fn convert(self, out: QFormat, mode: Rounding) -> Saturating<FixedQ> {
        let shift = self.format.fractional_bits() as i32 - out.fractional_bits() as i32;
        FixedQ::from_raw_saturating(rescale(self.raw as i128, shift, mode), out)
    }

    pub fn is_negative(self) -> bool {
        self.raw < 0
    }
}

impl fmt::Display for FixedQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} raw {})", self.to_real(), self.format, self.raw)
    }
}

/// Drops `shift` low bits (or appends `-shift` zero bits). Left shifts that
/// would overflow an i128 return the saturated extreme with the value's sign,
/// which every caller then clamps into its own format.
fn rescale(value: i128, shift: i32, mode: Rounding) -> i128 {
    if shift == 0 {
        return value;
    }
    if shift < 0 {
        let up = (-shift) as u32;
        if value == 0 {
            return 0;
        }
        if up >= 126 || value.unsigned_abs() > (i128::MAX >> up) as u128 {
            return if value < 0 { i128::MIN } else { i128::MAX };
        }
        return value << up;
    }
    let shift = shift.min(126) as u32;
    let half = 1i128 << (shift - 1);
    match mode {
        Rounding::Floor => value >> shift,
        Rounding::Truncate => {
            if value < 0 {
                -((-value) >> shift)
            } else {
                value >> shift
            }
        }
        Rounding::HalfUp => (value + half) >> shift,
        Rounding::HalfAwayFromZero => {
            if value < 0 {
                -((-value + half) >> shift)
            } else {
                (value + half) >> shift
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: f64, fmt: QFormat) -> FixedQ {
        FixedQ::from_real(x, fmt).unwrap()
    }

    #[test]
    fn from_real_pins_default_rounding() {
        // 0.01 * 2^20 = 10485.76
        assert_eq!(q(0.01, QFormat::Q4_20).raw(), 10486);
        assert_eq!(q(0.0, QFormat::Q4_20).raw(), 0);
        // 1.005 * 2^20 = 1053818.88
        assert_eq!(q(1.005, QFormat::Q4_20).raw(), 1053819);
        let t = FixedQ::from_real_with(1.005, QFormat::Q4_20, Rounding::Truncate).unwrap();
        assert_eq!(t.raw(), 1053818);
        let n = FixedQ::from_real_with(-1.005, QFormat::Q4_20, Rounding::Floor).unwrap();
        assert_eq!(n.raw(), -1053819);
        let n = FixedQ::from_real_with(-1.005, QFormat::Q4_20, Rounding::Truncate).unwrap();
        assert_eq!(n.raw(), -1053818);
    }

    #[test]
    fn from_real_rejects_out_of_range() {
        assert!(matches!(
            FixedQ::from_real(16.0, QFormat::Q4_20),
            Err(FixedError::Overflow { .. })
        ));
        assert!(FixedQ::from_real(-16.0, QFormat::Q4_20).is_ok());
        assert!(FixedQ::from_real(f64::NAN, QFormat::Q4_20).is_err());
        assert!(FixedQ::from_real(1.0, QFormat::Q0_20).is_err());
    }

    #[test]
    fn format_limits() {
        assert_eq!(QFormat::Q4_20.width(), 25);
        assert_eq!(QFormat::Q4_20.max_raw(), (1 << 24) - 1);
        assert_eq!(QFormat::Q0_20.min_raw(), -(1 << 20));
        assert!(QFormat::new(40, 24).is_err());
        assert_eq!(QFormat::new(0, 63).unwrap().max_raw(), i64::MAX);
        assert_eq!(QFormat::Q2_20.to_string(), "Q2.20");
    }

    #[test]
    fn mul_identity_and_saturation() {
        let one = q(1.0, QFormat::Q4_20);
        let r = one.mul(one, QFormat::Q4_20);
        assert_eq!(r.value, one);
        assert!(!r.saturated);

        let max = FixedQ::max(QFormat::Q4_20);
        let r = max.mul(max, QFormat::Q4_20);
        assert_eq!(r.value, max);
        assert!(r.saturated);

        let r = FixedQ::min(QFormat::Q4_20).mul(max, QFormat::Q4_20);
        assert_eq!(r.value, FixedQ::min(QFormat::Q4_20));
        assert!(r.saturated);
    }

    #[test]
    fn mul_by_integer_format() {
        let beta = q(0.01, QFormat::Q4_20);
        let hundred = FixedQ::from_raw(100, QFormat::integer(12).unwrap()).unwrap();
        let r = beta.mul(hundred, QFormat::Q4_20);
        assert!(!r.saturated);
        // 10486 * 100 = 1048600 raw, exact
        assert_eq!(r.value.raw(), 1_048_600);
        assert!((r.value.to_real() - 1.0).abs() < 100.0 * QFormat::Q4_20.ulp());
    }

    #[test]
    fn mul_floors_negative_products() {
        // -2^-20 * 0.5 = -2^-21 floors to -2^-20
        let a = FixedQ::from_raw(-1, QFormat::Q4_20).unwrap();
        let half = q(0.5, QFormat::Q4_20);
        assert_eq!(a.mul(half, QFormat::Q4_20).value.raw(), -1);
        let r = a.mul_rounded(half, QFormat::Q4_20, Rounding::Truncate);
        assert_eq!(r.value.raw(), 0);
    }

    #[test]
    fn add_widens_by_one_bit() {
        let a = q(1.0, QFormat::Q1_20);
        let b = q(-1.0, QFormat::Q1_20);
        let s = a.add(b);
        assert_eq!(s.value.raw(), 0);
        assert_eq!(s.value.format(), QFormat::Q2_20);

        let s = q(0.5, QFormat::Q1_20).add(q(-0.25, QFormat::Q0_20));
        assert_eq!(s.value.to_real(), 0.25);

        let max = FixedQ::max(QFormat::Q1_20);
        let s = max.add(max);
        assert!(!s.saturated);
        // Q1.20 max is 2 - 2^-20, so the widened sum is 4 - 2^-19.
        assert_eq!(s.value.to_real(), 4.0 - 2f64.powi(-19));
        assert_eq!(s.value.raw(), 2 * ((1 << 21) - 1));
    }

    #[test]
    fn add_aligns_fractional_bits() {
        let a = FixedQ::from_raw(3, QFormat::new(3, 2).unwrap()).unwrap(); // 0.75
        let b = FixedQ::from_raw(1, QFormat::new(1, 4).unwrap()).unwrap(); // 0.0625
        let s = a.add(b).value;
        assert_eq!(s.format(), QFormat::new(4, 4).unwrap());
        assert_eq!(s.raw(), 13);
    }

    #[test]
    fn convert_between_formats() {
        let x = q(-0.75, QFormat::Q4_20);
        let c = x
            .convert(QFormat::new(2, 1).unwrap(), Rounding::Floor)
            .value;
        assert_eq!(c.raw(), -2);
        let c = x.convert(QFormat::Q0_20, Rounding::Floor);
        assert!(!c.saturated);
        let c = q(3.0, QFormat::Q4_20).convert(QFormat::Q1_20, Rounding::Floor);
        assert!(c.saturated);
        assert_eq!(c.value, FixedQ::max(QFormat::Q1_20));
    }
}
