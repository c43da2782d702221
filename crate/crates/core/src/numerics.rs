//! Fixed-point values with explicit Q formats.
//!
//! Every kernel in the crate stores samples as raw two's-complement integers
//! tagged with a [`QFormat`]. Products go into a [`WideAccumulator`] without
//! loss; the only rounding points are [`quantize`] and [`renormalize`], both
//! of which round half away from zero.

use std::fmt;

use num_traits::{PrimInt, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Signed fixed-point layout: `integer_bits` (sign included) plus
/// `fraction_bits`, at most 32 bits in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QFormat {
    integer_bits: u8,
    fraction_bits: u8,
}

impl QFormat {
    /// 8-bit samples on the distributed-arithmetic paths.
    pub const Q1_7: QFormat = QFormat::new_unchecked(1, 7);
    /// 16-bit filter and matrix coefficients.
    pub const Q1_15: QFormat = QFormat::new_unchecked(1, 15);
    /// 16-bit transform samples.
    pub const Q2_13: QFormat = QFormat::new_unchecked(2, 13);

    pub fn new(integer_bits: u8, fraction_bits: u8) -> Result<Self> {
        if integer_bits == 0 || integer_bits as u32 + fraction_bits as u32 > 32 {
            return Err(Error::InvalidFormat {
                integer_bits,
                fraction_bits,
            });
        }
        Ok(Self {
            integer_bits,
            fraction_bits,
        })
    }

    pub(crate) const fn new_unchecked(integer_bits: u8, fraction_bits: u8) -> Self {
        assert!(integer_bits >= 1 && integer_bits as u32 + fraction_bits as u32 <= 32);
        Self {
            integer_bits,
            fraction_bits,
        }
    }

    pub fn integer_bits(self) -> u8 {
        self.integer_bits
    }

    pub fn fraction_bits(self) -> u8 {
        self.fraction_bits
    }

    pub fn total_bits(self) -> u32 {
        self.integer_bits as u32 + self.fraction_bits as u32
    }

    pub fn max_raw(self) -> i64 {
        (1i64 << (self.total_bits() - 1)) - 1
    }

    pub fn min_raw(self) -> i64 {
        -(1i64 << (self.total_bits() - 1))
    }

    /// Weight of one least-significant bit.
    pub fn lsb(self) -> f64 {
        (-(self.fraction_bits as f64)).exp2()
    }

    pub fn contains(self, raw: i64) -> bool {
        (self.min_raw()..=self.max_raw()).contains(&raw)
    }

    /// Clamps `raw` into range, reporting whether it had to.
    pub fn saturate(self, raw: i64) -> (i64, bool) {
        if raw > self.max_raw() {
            (self.max_raw(), true)
        } else if raw < self.min_raw() {
            (self.min_raw(), true)
        } else {
            (raw, false)
        }
    }
}

impl fmt::Display for QFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}.{}", self.integer_bits, self.fraction_bits)
    }
}

/// Divides by `2^shift`, rounding half away from zero. Works for any signed
/// primitive so the FFT's exact mode can reuse it on `i128`.
pub fn round_shift<T: PrimInt + Signed>(value: T, shift: u32) -> T {
    if shift == 0 {
        return value;
    }
    let half = T::one() << (shift as usize - 1);
    if value < T::zero() {
        -((-value + half) >> shift as usize)
    } else {
        (value + half) >> shift as usize
    }
}

/// Moves `raw` from `from` fraction bits to `to` fraction bits: exact when
/// widening, rounded half away from zero when narrowing.
pub fn rescale<T: PrimInt + Signed>(raw: T, from: u32, to: u32) -> T {
    if to >= from {
        raw << (to - from) as usize
    } else {
        round_shift(raw, from - to)
    }
}

/// A sample: raw integer plus its format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedPoint {
    raw: i64,
    format: QFormat,
}

impl FixedPoint {
    pub fn from_raw(raw: i64, format: QFormat) -> Result<Self> {
        if !format.contains(raw) {
            return Err(Error::Overflow {
                format: format.to_string(),
            });
        }
        Ok(Self { raw, format })
    }

    pub fn zero(format: QFormat) -> Self {
        Self { raw: 0, format }
    }

    /// Saturating constructor; the flag reports clamping.
    pub fn saturating(raw: i64, format: QFormat) -> (Self, bool) {
        let (raw, saturated) = format.saturate(raw);
        (Self { raw, format }, saturated)
    }

    pub fn raw(self) -> i64 {
        self.raw
    }

    pub fn format(self) -> QFormat {
        self.format
    }

    pub fn value(self) -> f64 {
        self.raw as f64 * self.format.lsb()
    }

    /// Converts to `target`, rounding and saturating.
    pub fn requantize(self, target: QFormat) -> (Self, bool) {
        let raw = rescale(
            self.raw,
            self.format.fraction_bits as u32,
            target.fraction_bits as u32,
        );
        Self::saturating(raw, target)
    }

    /// Lossless conversion into a format at least as wide on both sides.
    pub fn widen(self, target: QFormat) -> Result<Self> {
        if target.fraction_bits < self.format.fraction_bits
            || target.integer_bits < self.format.integer_bits
        {
            return Err(Error::FormatMismatch {
                left: self.format.to_string(),
                right: target.to_string(),
            });
        }
        let shift = target.fraction_bits - self.format.fraction_bits;
        Ok(Self {
            raw: self.raw << shift,
            format: target,
        })
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Complex sample; both parts share one format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexFixed {
    re: FixedPoint,
    im: FixedPoint,
}

impl ComplexFixed {
    pub fn new(re: FixedPoint, im: FixedPoint) -> Result<Self> {
        check_same_format(re, im)?;
        Ok(Self { re, im })
    }

    pub fn from_raw(re: i64, im: i64, format: QFormat) -> Result<Self> {
        Ok(Self {
            re: FixedPoint::from_raw(re, format)?,
            im: FixedPoint::from_raw(im, format)?,
        })
    }

    pub fn zero(format: QFormat) -> Self {
        Self {
            re: FixedPoint::zero(format),
            im: FixedPoint::zero(format),
        }
    }

    pub fn re(self) -> FixedPoint {
        self.re
    }

    pub fn im(self) -> FixedPoint {
        self.im
    }

    pub fn format(self) -> QFormat {
        self.re.format
    }

    pub fn widen(self, target: QFormat) -> Result<Self> {
        Ok(Self {
            re: self.re.widen(target)?,
            im: self.im.widen(target)?,
        })
    }
}

/// Exact sum-of-products register. 64 bits covers every kernel here: the
/// worst FIR case is 16 taps of 8-bit samples times 16-bit coefficients,
/// which needs 28 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WideAccumulator {
    raw: i64,
    fraction_bits: u8,
}

impl WideAccumulator {
    pub fn new(raw: i64, fraction_bits: u8) -> Self {
        Self { raw, fraction_bits }
    }

    pub fn raw(self) -> i64 {
        self.raw
    }

    pub fn fraction_bits(self) -> u8 {
        self.fraction_bits
    }

    pub fn value(self) -> f64 {
        self.raw as f64 * (-(self.fraction_bits as f64)).exp2()
    }

    /// Exact sum of two accumulators at the same scale.
    pub fn add(self, other: WideAccumulator) -> WideAccumulator {
        assert_eq!(self.fraction_bits, other.fraction_bits, "accumulator scale");
        WideAccumulator {
            raw: self
                .raw
                .checked_add(other.raw)
                .expect("wide accumulator overflow"),
            fraction_bits: self.fraction_bits,
        }
    }
}

/// Result of [`renormalize`]: the value plus whether it was clamped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Renormalized {
    pub value: FixedPoint,
    pub saturated: bool,
}

/// Rounds `value * 2^fraction_bits` half away from zero.
pub fn quantize(value: f64, format: QFormat) -> Result<FixedPoint> {
    let bound = ((format.integer_bits - 1) as f64).exp2();
    let overflow = || Error::Overflow {
        format: format.to_string(),
    };
    if !value.is_finite() || value.abs() >= bound {
        return Err(overflow());
    }
    // f64::round is half-away-from-zero.
    let raw = (value * (format.fraction_bits as f64).exp2()).round() as i64;
    FixedPoint::from_raw(raw, format).map_err(|_| overflow())
}

fn check_same_format(a: FixedPoint, b: FixedPoint) -> Result<()> {
    if a.format != b.format {
        return Err(Error::FormatMismatch {
            left: a.format.to_string(),
            right: b.format.to_string(),
        });
    }
    Ok(())
}

pub fn fx_add(a: FixedPoint, b: FixedPoint) -> Result<FixedPoint> {
    check_same_format(a, b)?;
    FixedPoint::from_raw(a.raw + b.raw, a.format)
}

pub fn fx_sub(a: FixedPoint, b: FixedPoint) -> Result<FixedPoint> {
    check_same_format(a, b)?;
    FixedPoint::from_raw(a.raw - b.raw, a.format)
}

/// Full-precision product; fraction bits add.
pub fn fx_mul(a: FixedPoint, b: FixedPoint) -> WideAccumulator {
    WideAccumulator {
        raw: a.raw * b.raw,
        fraction_bits: a.format.fraction_bits + b.format.fraction_bits,
    }
}

pub fn renormalize(acc: WideAccumulator, target: QFormat) -> Renormalized {
    let raw = rescale(
        acc.raw,
        acc.fraction_bits as u32,
        target.fraction_bits as u32,
    );
    let (value, saturated) = FixedPoint::saturating(raw, target);
    Renormalized { value, saturated }
}
