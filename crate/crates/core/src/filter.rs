//! Streaming FIR and IIR filters on coefficient units.
//!
//! Samples on these paths are 8 bits wide and coefficients are Q1.15. The
//! IIR filter is built as a forward FIR over `x`, a feedback FIR over past
//! outputs, and an adder joining the two; the joined value is rounded back
//! to the sample format before it enters the feedback delay line.

use std::collections::VecDeque;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::da::{build_unit, da_dot, tree_census, CoefficientUnit};
use crate::error::{Error, Result};
use crate::numerics::{quantize, renormalize, FixedPoint, QFormat, WideAccumulator};
use crate::scalar::Scalar;

pub const MAX_TAPS: usize = 16;

/// Default FIR output format: 15 fraction bits and headroom for 16 taps.
pub const FIR_OUTPUT: QFormat = QFormat::new_unchecked(5, 15);

/// Sample format of the filter datapaths.
pub const SAMPLE: QFormat = QFormat::Q1_7;

/// Coefficient format of every table-driven filter.
pub const COEFFICIENT: QFormat = QFormat::Q1_15;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirSpec {
    taps: Vec<FixedPoint>,
    units: Vec<CoefficientUnit>,
    output: QFormat,
}

impl FirSpec {
    pub fn new(taps: Vec<FixedPoint>) -> Result<Self> {
        if taps.is_empty() || taps.len() > MAX_TAPS {
            return Err(Error::TapCount {
                max: MAX_TAPS,
                actual: taps.len(),
            });
        }
        if let Some(bad) = taps.iter().find(|t| t.format() != COEFFICIENT) {
            return Err(Error::FormatMismatch {
                left: bad.format().to_string(),
                right: COEFFICIENT.to_string(),
            });
        }
        let units = taps.iter().map(|&t| build_unit(t)).collect();
        Ok(Self {
            taps,
            units,
            output: FIR_OUTPUT,
        })
    }

    /// Quantizes real-valued taps to Q1.15.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let taps = values
            .iter()
            .map(|&v| quantize(v, COEFFICIENT))
            .collect::<Result<Vec<_>>>()?;
        Self::new(taps)
    }

    pub fn with_output(mut self, output: QFormat) -> Self {
        self.output = output;
        self
    }

    pub fn taps(&self) -> &[FixedPoint] {
        &self.taps
    }

    pub fn units(&self) -> &[CoefficientUnit] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn output(&self) -> QFormat {
        self.output
    }
}

/// Delay line: newest sample first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirState {
    delay: VecDeque<FixedPoint>,
}

impl FirState {
    pub fn new(len: usize, format: QFormat) -> Self {
        Self {
            delay: std::iter::repeat_n(FixedPoint::zero(format), len).collect(),
        }
    }

    pub fn for_spec(spec: &FirSpec) -> Self {
        Self::new(spec.len(), SAMPLE)
    }

    pub fn samples(&self) -> impl Iterator<Item = &FixedPoint> {
        self.delay.iter()
    }

    fn push(&mut self, x: FixedPoint) {
        assert_eq!(
            x.format(),
            self.delay[0].format(),
            "delay line sample format"
        );
        self.delay.pop_back();
        self.delay.push_front(x);
    }

    fn dot(&self, units: &[CoefficientUnit]) -> WideAccumulator {
        let samples: Vec<FixedPoint> = self.delay.iter().copied().collect();
        da_dot(units, &samples).expect("delay line sized to spec")
    }
}

/// Exact sum for the current delay line, before output rounding.
pub fn fir_accumulate(spec: &FirSpec, state: &FirState) -> WideAccumulator {
    state.dot(&spec.units)
}

pub fn fir_step(spec: &FirSpec, mut state: FirState, x: FixedPoint) -> (FixedPoint, FirState) {
    state.push(x);
    let y = renormalize(state.dot(&spec.units), spec.output).value;
    (y, state)
}

/// Runs a whole stream from a zeroed delay line.
pub fn fir_filter(spec: &FirSpec, input: &[FixedPoint]) -> Vec<FixedPoint> {
    let format = input.first().map_or(SAMPLE, |x| x.format());
    let mut state = FirState::new(spec.len(), format);
    let mut out = Vec::with_capacity(input.len());
    for &x in input {
        let (y, next) = fir_step(spec, state, x);
        state = next;
        out.push(y);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IirSpec {
    forward: FirSpec,
    feedback: Vec<FixedPoint>,
    feedback_units: Vec<CoefficientUnit>,
}

impl IirSpec {
    /// `feedback[m-1]` multiplies `y[n-m]`; its length must be one less than
    /// the forward length.
    pub fn new(forward: FirSpec, feedback: Vec<FixedPoint>) -> Result<Self> {
        if feedback.len() + 1 != forward.len() {
            return Err(Error::LengthMismatch {
                expected: forward.len() - 1,
                actual: feedback.len(),
            });
        }
        if let Some(bad) = feedback.iter().find(|t| t.format() != COEFFICIENT) {
            return Err(Error::FormatMismatch {
                left: bad.format().to_string(),
                right: COEFFICIENT.to_string(),
            });
        }
        let gain: f64 = feedback.iter().map(|b| b.value().abs()).sum();
        if gain >= 1.0 {
            warn!("IIR feedback sum |b| = {gain:.4} >= 1; the filter may be unstable");
        }
        let feedback_units = feedback.iter().map(|&b| build_unit(b)).collect();
        Ok(Self {
            forward,
            feedback,
            feedback_units,
        })
    }

    pub fn from_values(forward: &[f64], feedback: &[f64]) -> Result<Self> {
        let fb = feedback
            .iter()
            .map(|&v| quantize(v, COEFFICIENT))
            .collect::<Result<Vec<_>>>()?;
        Self::new(FirSpec::from_values(forward)?, fb)
    }

    pub fn forward(&self) -> &FirSpec {
        &self.forward
    }

    pub fn feedback(&self) -> &[FixedPoint] {
        &self.feedback
    }

    pub fn feedback_units(&self) -> &[CoefficientUnit] {
        &self.feedback_units
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IirState {
    forward: FirState,
    /// `y[n-1] .. y[n-L+1]`, already in the sample format.
    feedback: FirState,
}

impl IirState {
    pub fn for_spec(spec: &IirSpec) -> Self {
        Self {
            forward: FirState::new(spec.len(), SAMPLE),
            feedback: FirState::new(spec.feedback.len(), SAMPLE),
        }
    }
}

/// One output of the two-FIR structure. The output is also the value fed
/// back, so it is in the sample format.
pub fn iir_step(spec: &IirSpec, mut state: IirState, x: FixedPoint) -> (FixedPoint, IirState) {
    state.forward.push(x);
    let forward = state.forward.dot(spec.forward.units());
    let total = if spec.feedback.is_empty() {
        forward
    } else {
        forward.add(state.feedback.dot(&spec.feedback_units))
    };
    let y = renormalize(total, SAMPLE).value;
    if !spec.feedback.is_empty() {
        state.feedback.push(y);
    }
    (y, state)
}

pub fn iir_filter(spec: &IirSpec, input: &[FixedPoint]) -> Vec<FixedPoint> {
    let mut state = IirState::for_spec(spec);
    let mut out = Vec::with_capacity(input.len());
    for &x in input {
        let (y, next) = iir_step(spec, state, x);
        state = next;
        out.push(y);
    }
    out
}

/// Back-substitutes the feedback terms to get the first `horizon` samples
/// of the impulse response, `h[n] = a[n] + sum_m b[m] h[n-m]`.
///
/// `feedback[m-1]` is `b[m]`. In exact arithmetic, filtering with the
/// returned taps reproduces the recursion for the first `horizon` outputs.
pub fn expand_feedback_coefficients<T: Scalar>(forward: &[T], feedback: &[T], horizon: usize) -> Vec<T> {
    let mut h: Vec<T> = Vec::with_capacity(horizon);
    for n in 0..horizon {
        let mut acc = forward.get(n).cloned().unwrap_or_else(T::zero);
        for (m, b) in feedback.iter().enumerate() {
            let lag = m + 1;
            if lag <= n {
                acc = acc + b.clone() * h[n - lag].clone();
            }
        }
        h.push(acc);
    }
    h
}

/// Truncated feed-forward equivalent of an IIR filter, quantized to Q1.15.
pub fn expand_feedback(spec: &IirSpec, horizon: usize) -> Result<FirSpec> {
    if horizon < spec.len() {
        return Err(Error::HorizonTooSmall {
            horizon,
            length: spec.len(),
        });
    }
    let frac = COEFFICIENT.fraction_bits();
    let a: Vec<f64> = spec
        .forward
        .taps()
        .iter()
        .map(|t| f64::from_fixed(t.raw(), frac))
        .collect();
    let b: Vec<f64> = spec
        .feedback
        .iter()
        .map(|t| f64::from_fixed(t.raw(), frac))
        .collect();
    let h = expand_feedback_coefficients(&a, &b, horizon);
    FirSpec::from_values(&h)
}

/// Common-module counts implied by a filter structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FilterCensus {
    pub luts: usize,
    pub adders: usize,
    pub registers: usize,
}

/// `taps` coefficient units: two tables and one combine adder each, a
/// balanced tree joining them, and one delay register per tap.
pub fn fir_census(taps: usize) -> FilterCensus {
    FilterCensus {
        luts: 2 * taps,
        adders: taps + tree_census(taps).adders,
        registers: taps,
    }
}

/// Forward unit + feedback unit + the joining adder + the rounding adder
/// that returns the sum to the sample format inside the loop.
pub fn iir_census(taps: usize) -> FilterCensus {
    let forward = fir_census(taps);
    let feedback = if taps > 1 {
        fir_census(taps - 1)
    } else {
        FilterCensus::default()
    };
    let join = if taps > 1 { 2 } else { 1 };
    FilterCensus {
        luts: forward.luts + feedback.luts,
        adders: forward.adders + feedback.adders + join,
        registers: forward.registers + feedback.registers,
    }
}
