//! 16-point radix-2 FFT on eight reusable butterfly units.
//!
//! Each butterfly multiplies through the three-multiplier form
//!
//! ```text
//! R = (c - s) b + c (a - b)
//! I = (c + s) a - c (a - b)
//! ```
//!
//! with `c - s`, `c + s` and `c` held in a twiddle table. The transform is
//! decimation-in-time: inputs are read in bit-reversed order, the same
//! eight butterflies run four times with spans 1, 2, 4, 8, and outputs come
//! out in natural order.

use num_complex::Complex;
use num_traits::{PrimInt, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{rescale, round_shift, ComplexFixed, FixedPoint, QFormat, WideAccumulator};
use crate::oracle;

pub const FFT_SIZE: usize = 16;
pub const FFT_STAGES: usize = 4;
pub const BUTTERFLIES: usize = FFT_SIZE / 2;

/// Twiddle format: `|c +- s|` reaches sqrt(2), so two integer bits.
pub const TWIDDLE: QFormat = QFormat::new_unchecked(2, 16);

/// Internal and output sample format: inputs in Q2.13 can grow 16x.
pub const FFT_SAMPLE: QFormat = QFormat::new_unchecked(7, 13);

/// The three stored values that replace a sine/cosine pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwiddleEntry {
    c_minus_s: FixedPoint,
    c_plus_s: FixedPoint,
    c: FixedPoint,
}

impl TwiddleEntry {
    /// Twiddle for `cos(theta) + i sin(theta)`. The sums are formed from the
    /// quantized cosine and sine, so the three values stay consistent.
    pub fn from_angle(theta: f64) -> Self {
        let scale = (TWIDDLE.fraction_bits() as f64).exp2();
        let c = (theta.cos() * scale).round() as i64;
        let s = (theta.sin() * scale).round() as i64;
        let fx = |raw| FixedPoint::from_raw(raw, TWIDDLE).expect("|c +- s| <= sqrt 2");
        Self {
            c_minus_s: fx(c - s),
            c_plus_s: fx(c + s),
            c: fx(c),
        }
    }

    /// `W_n^k = exp(-2 pi i k / n)`.
    pub fn unit_root(k: usize, n: usize) -> Self {
        Self::from_angle(-2.0 * std::f64::consts::PI * k as f64 / n as f64)
    }

    pub fn c_minus_s(&self) -> FixedPoint {
        self.c_minus_s
    }

    pub fn c_plus_s(&self) -> FixedPoint {
        self.c_plus_s
    }

    pub fn c(&self) -> FixedPoint {
        self.c
    }

    /// Recovered sine, `c - (c - s)`.
    pub fn s(&self) -> FixedPoint {
        FixedPoint::from_raw(self.c.raw() - self.c_minus_s.raw(), TWIDDLE).expect("sine in range")
    }

    /// Raw `[c - s, c + s, c]`.
    pub fn raw(&self) -> [i64; 3] {
        [self.c_minus_s.raw(), self.c_plus_s.raw(), self.c.raw()]
    }
}

/// Common modules inside one butterfly: the complex multiplier contributes
/// one adder, two subtractors and three multipliers; the output stage adds
/// one complex adder and one complex subtractor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ButterflyUnit;

impl ButterflyUnit {
    pub const ADDERS: usize = 1 + 1;
    pub const SUBTRACTORS: usize = 1 + 2;
    pub const MULTIPLIERS: usize = 3;
}

/// The three-multiplier product over any signed integer type. `mul` is the
/// only place multiplication happens, so callers can count invocations.
pub fn complex_mul3_raw<T: PrimInt + Signed>(a: T, b: T, w: [T; 3], mul: &mut impl FnMut(T, T) -> T) -> (T, T) {
    let [c_minus_s, c_plus_s, c] = w;
    let shared = a - b;
    let p_b = mul(c_minus_s, b);
    let p_shared = mul(c, shared);
    let p_a = mul(c_plus_s, a);
    (p_b + p_shared, p_a - p_shared)
}

/// Exact product before rounding; fraction bits are the sample's plus the
/// twiddle's.
pub fn complex_mul3_wide(z: ComplexFixed, w: &TwiddleEntry) -> (WideAccumulator, WideAccumulator) {
    let (re, im) = complex_mul3_raw(z.re().raw(), z.im().raw(), w.raw(), &mut |x, y| x * y);
    let frac = z.format().fraction_bits() + TWIDDLE.fraction_bits();
    (WideAccumulator::new(re, frac), WideAccumulator::new(im, frac))
}

/// `z * w` rounded back into `z`'s format. `mul` performs each of the three
/// real multiplications.
pub fn complex_mul3_with(z: ComplexFixed, w: &TwiddleEntry, mul: &mut impl FnMut(i64, i64) -> i64) -> ComplexFixed {
    let format = z.format();
    let (re, im) = complex_mul3_raw(z.re().raw(), z.im().raw(), w.raw(), mul);
    let shift = TWIDDLE.fraction_bits() as u32;
    let part = |v: i64| FixedPoint::saturating(round_shift(v, shift), format).0;
    ComplexFixed::new(part(re), part(im)).expect("shared format")
}

pub fn complex_mul3(z: ComplexFixed, w: &TwiddleEntry) -> ComplexFixed {
    complex_mul3_with(z, w, &mut |x, y| x * y)
}

/// Rounds and saturates a butterfly output, halving it first when per-stage
/// scaling is enabled.
pub(crate) fn butterfly_output(raw: i64, scaled: bool, format: QFormat) -> (i64, bool) {
    let v = if scaled { round_shift(raw, 1) } else { raw };
    format.saturate(v)
}

fn butterfly_scaled(top: ComplexFixed, bottom: ComplexFixed, w: &TwiddleEntry, scaled: bool) -> (ComplexFixed, ComplexFixed) {
    let format = top.format();
    assert_eq!(format, bottom.format(), "butterfly operand formats");
    let wb = complex_mul3(bottom, w);
    let out = |re: i64, im: i64| {
        let (re, _) = butterfly_output(re, scaled, format);
        let (im, _) = butterfly_output(im, scaled, format);
        ComplexFixed::from_raw(re, im, format).expect("saturated")
    };
    let (t, b) = (top, wb);
    (
        out(t.re().raw() + b.re().raw(), t.im().raw() + b.im().raw()),
        out(t.re().raw() - b.re().raw(), t.im().raw() - b.im().raw()),
    )
}

/// Decimation-in-time butterfly: `(top + w bottom, top - w bottom)`.
pub fn butterfly(top: ComplexFixed, bottom: ComplexFixed, w: &TwiddleEntry) -> (ComplexFixed, ComplexFixed) {
    butterfly_scaled(top, bottom, w, false)
}

/// Positions touched by butterfly `b` in `stage` (span `2^stage`), and the
/// twiddle exponent `k` of `W_16^k` it uses.
pub fn butterfly_positions(stage: usize, b: usize) -> (usize, usize, usize) {
    let span = 1 << stage;
    let top = (b / span) * 2 * span + b % span;
    let k = (b % span) * (BUTTERFLIES / span);
    (top, top + span, k)
}

pub fn bit_reverse(i: usize, bits: u32) -> usize {
    i.reverse_bits() >> (usize::BITS - bits)
}

/// Stage counter encoding on the select lines `(s0, s1)`.
pub fn stage_select(stage: usize) -> (bool, bool) {
    (stage & 1 != 0, stage & 2 != 0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FftPlan {
    twiddles: Vec<TwiddleEntry>,
    scale_per_stage: bool,
    /// `s2`: lets two 16-point passes be chained into a 32-point transform.
    scalable: bool,
}

impl Default for FftPlan {
    fn default() -> Self {
        Self::new()
    }
}

impl FftPlan {
    pub fn new() -> Self {
        Self {
            twiddles: (0..BUTTERFLIES).map(|k| TwiddleEntry::unit_root(k, FFT_SIZE)).collect(),
            scale_per_stage: false,
            scalable: false,
        }
    }

    /// Halves every butterfly output (so the result is `X / 16`).
    pub fn with_stage_scaling(mut self, on: bool) -> Self {
        self.scale_per_stage = on;
        self
    }

    pub fn with_scalable(mut self, on: bool) -> Self {
        self.scalable = on;
        self
    }

    pub fn n(&self) -> usize {
        FFT_SIZE
    }

    pub fn stages(&self) -> usize {
        FFT_STAGES
    }

    pub fn butterflies_per_stage(&self) -> usize {
        BUTTERFLIES
    }

    pub fn twiddles(&self) -> &[TwiddleEntry] {
        &self.twiddles
    }

    pub fn stage_scaling(&self) -> bool {
        self.scale_per_stage
    }

    pub fn scalable(&self) -> bool {
        self.scalable
    }
}

fn load(x: &[ComplexFixed]) -> Result<Vec<ComplexFixed>> {
    if x.len() != FFT_SIZE {
        return Err(Error::LengthMismatch {
            expected: FFT_SIZE,
            actual: x.len(),
        });
    }
    let widened = x
        .iter()
        .map(|z| z.widen(FFT_SAMPLE))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..FFT_SIZE)
        .map(|i| widened[bit_reverse(i, FFT_STAGES as u32)])
        .collect())
}

/// Sixteen-point transform; inputs are widened losslessly to Q7.13 and the
/// result is in Q7.13.
pub fn fft16(plan: &FftPlan, x: &[ComplexFixed]) -> Result<Vec<ComplexFixed>> {
    let mut data = load(x)?;
    for stage in 0..FFT_STAGES {
        for b in 0..BUTTERFLIES {
            let (i, j, k) = butterfly_positions(stage, b);
            let (top, bottom) = butterfly_scaled(data[i], data[j], &plan.twiddles[k], plan.scale_per_stage);
            data[i] = top;
            data[j] = bottom;
        }
    }
    Ok(data)
}

/// Exact transform: no rounding anywhere, values are
/// `raw / 2^fraction_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WideSpectrum {
    pub values: Vec<(i128, i128)>,
    pub fraction_bits: u32,
}

impl WideSpectrum {
    /// Single rounding into Q7.13.
    pub fn quantize(&self) -> Vec<ComplexFixed> {
        let to = FFT_SAMPLE.fraction_bits() as u32;
        let part = |v: i128| {
            let r = rescale(v, self.fraction_bits, to);
            let clamped = r.clamp(FFT_SAMPLE.min_raw() as i128, FFT_SAMPLE.max_raw() as i128);
            clamped as i64
        };
        self.values
            .iter()
            .map(|&(re, im)| ComplexFixed::from_raw(part(re), part(im), FFT_SAMPLE).expect("clamped"))
            .collect()
    }
}

/// Same butterfly schedule as [`fft16`] in exact 128-bit arithmetic.
pub fn fft16_wide(plan: &FftPlan, x: &[ComplexFixed]) -> Result<WideSpectrum> {
    let data = load(x)?;
    let mut values: Vec<(i128, i128)> = data
        .iter()
        .map(|z| (z.re().raw() as i128, z.im().raw() as i128))
        .collect();
    let tw_bits = TWIDDLE.fraction_bits() as usize;
    let mut frac = FFT_SAMPLE.fraction_bits() as u32;
    for stage in 0..FFT_STAGES {
        let mut next = values.clone();
        for b in 0..BUTTERFLIES {
            let (i, j, k) = butterfly_positions(stage, b);
            let w = plan.twiddles[k].raw().map(|v| v as i128);
            let (top, bottom) = (values[i], values[j]);
            let (re, im) = complex_mul3_raw(bottom.0, bottom.1, w, &mut |x, y| x * y);
            let (tr, ti) = (top.0 << tw_bits, top.1 << tw_bits);
            next[i] = (tr + re, ti + im);
            next[j] = (tr - re, ti - im);
        }
        values = next;
        frac += tw_bits as u32;
    }
    Ok(WideSpectrum {
        values,
        fraction_bits: frac,
    })
}

/// 32-point transform from two 16-point passes and one combining stage
/// with `W_32^k` twiddles. Requires the plan's `s2` flag.
pub fn fft32_chained(plan: &FftPlan, x: &[ComplexFixed]) -> Result<Vec<ComplexFixed>> {
    if !plan.scalable {
        return Err(Error::UnsupportedSize(2 * FFT_SIZE));
    }
    if x.len() != 2 * FFT_SIZE {
        return Err(Error::LengthMismatch {
            expected: 2 * FFT_SIZE,
            actual: x.len(),
        });
    }
    let even: Vec<_> = x.iter().step_by(2).copied().collect();
    let odd: Vec<_> = x.iter().skip(1).step_by(2).copied().collect();
    let e = fft16(plan, &even)?;
    let o = fft16(plan, &odd)?;
    let mut out = vec![ComplexFixed::zero(FFT_SAMPLE); 2 * FFT_SIZE];
    for k in 0..FFT_SIZE {
        let w = TwiddleEntry::unit_root(k, 2 * FFT_SIZE);
        let (top, bottom) = butterfly_scaled(e[k], o[k], &w, plan.scale_per_stage);
        out[k] = top;
        out[k + FFT_SIZE] = bottom;
    }
    Ok(out)
}

/// Direct `O(n^2)` DFT in double precision, rounded into Q7.13.
pub fn dft_naive(x: &[ComplexFixed], n: usize) -> Result<Vec<ComplexFixed>> {
    if x.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    let input: Vec<Complex<f64>> = x.iter().map(|z| Complex::new(z.re().value(), z.im().value())).collect();
    let spectrum = oracle::dft_direct(&input);
    let scale = (FFT_SAMPLE.fraction_bits() as f64).exp2();
    let part = |v: f64| FixedPoint::saturating((v * scale).round() as i64, FFT_SAMPLE).0;
    Ok(spectrum
        .iter()
        .map(|z| ComplexFixed::new(part(z.re), part(z.im)).expect("shared format"))
        .collect())
}
