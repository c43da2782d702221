//! Forward DWT built from decimators (8-tap FIR followed by a 1-bit
//! counter that keeps every second output).
//!
//! Each pyramid level feeds its approximation branch back through the same
//! 8-bit datapath, so the sample format gains one integer bit per level:
//! level 1 reads Q1.7 and writes Q2.14, level 2 reads Q2.6 and writes Q3.13,
//! and so on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{fir_step, FirSpec, FirState, COEFFICIENT};
use crate::numerics::{quantize, FixedPoint, QFormat};

pub const DWT_TAPS: usize = 8;

/// Daubechies 8-tap wavelet (highpass) column.
pub const DAUBECHIES8_H0: [f64; 8] = [-0.0106, -0.0329, 0.0308, 0.1870, -0.0280, -0.6309, 0.7148, -0.2304];
/// Daubechies 8-tap scaling (lowpass) column.
pub const DAUBECHIES8_L0: [f64; 8] = [0.2304, 0.7148, 0.6309, -0.0280, -0.1870, 0.0308, 0.0329, -0.0106];

/// Construction tolerance on the tap sums, in coefficient LSBs.
const SUM_TOLERANCE_LSB: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Lowpass,
    Highpass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilationPair {
    h0: [FixedPoint; 8],
    l0: [FixedPoint; 8],
}

impl DilationPair {
    /// Checks that the lowpass taps sum to sqrt(2) and the highpass taps to
    /// zero, each within 8 coefficient LSBs.
    pub fn new(h0: [FixedPoint; 8], l0: [FixedPoint; 8]) -> Result<Self> {
        for t in h0.iter().chain(&l0) {
            if t.format() != COEFFICIENT {
                return Err(Error::FormatMismatch {
                    left: t.format().to_string(),
                    right: COEFFICIENT.to_string(),
                });
            }
        }
        let lsb = COEFFICIENT.lsb();
        let low: f64 = l0.iter().map(|t| t.value()).sum();
        let high: f64 = h0.iter().map(|t| t.value()).sum();
        if (low - std::f64::consts::SQRT_2).abs() > SUM_TOLERANCE_LSB * lsb {
            return Err(Error::DilationPair(format!("lowpass taps sum to {low}")));
        }
        if high.abs() > SUM_TOLERANCE_LSB * lsb {
            return Err(Error::DilationPair(format!("highpass taps sum to {high}")));
        }
        Ok(Self { h0, l0 })
    }

    pub fn from_values(h0: &[f64], l0: &[f64]) -> Result<Self> {
        let conv = |v: &[f64]| -> Result<[FixedPoint; 8]> {
            if v.len() != DWT_TAPS {
                return Err(Error::LengthMismatch {
                    expected: DWT_TAPS,
                    actual: v.len(),
                });
            }
            let taps = v
                .iter()
                .map(|&x| quantize(x, COEFFICIENT))
                .collect::<Result<Vec<_>>>()?;
            Ok(taps.try_into().expect("length checked"))
        };
        Self::new(conv(h0)?, conv(l0)?)
    }

    pub fn daubechies8() -> Self {
        Self::from_values(&DAUBECHIES8_H0, &DAUBECHIES8_L0).expect("embedded taps are valid")
    }

    pub fn h0(&self) -> &[FixedPoint; 8] {
        &self.h0
    }

    pub fn l0(&self) -> &[FixedPoint; 8] {
        &self.l0
    }

    pub fn taps(&self, branch: Branch) -> &[FixedPoint; 8] {
        match branch {
            Branch::Lowpass => &self.l0,
            Branch::Highpass => &self.h0,
        }
    }

    /// Decimator filter for one branch, writing `output`.
    pub fn branch_filter(&self, branch: Branch, output: QFormat) -> FirSpec {
        FirSpec::new(self.taps(branch).to_vec())
            .expect("eight Q1.15 taps")
            .with_output(output)
    }
}

/// Decimator output format for an 8-bit input format: one more integer bit,
/// 16 bits in total.
pub fn level_output_format(input: QFormat) -> QFormat {
    let ib = input.integer_bits() + 1;
    QFormat::new(ib, 16 - ib).expect("8-bit input formats only")
}

/// 8-bit input format of the level after one that wrote `output`.
pub fn next_level_input_format(output: QFormat) -> QFormat {
    let ib = output.integer_bits();
    QFormat::new(ib, 8 - ib).expect("at most 8 integer bits")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecimatorState {
    fir: FirState,
    /// 1-bit counter; an output is released when it wraps from 1 to 0.
    phase: bool,
    held: Option<FixedPoint>,
}

impl DecimatorState {
    pub fn new(input: QFormat) -> Self {
        Self {
            fir: FirState::new(DWT_TAPS, input),
            phase: false,
            held: None,
        }
    }

    pub fn phase(&self) -> bool {
        self.phase
    }

    pub fn held(&self) -> Option<FixedPoint> {
        self.held
    }
}

/// Advances the FIR by one sample. Even-indexed FIR outputs are latched;
/// each is released on the following (odd) sample.
pub fn decimate_step(
    spec: &FirSpec,
    state: DecimatorState,
    x: FixedPoint,
) -> (Option<FixedPoint>, DecimatorState) {
    let DecimatorState { fir, phase, held } = state;
    let (y, fir) = fir_step(spec, fir, x);
    if phase {
        (held, DecimatorState { fir, phase: false, held: None })
    } else {
        (None, DecimatorState { fir, phase: true, held: Some(y) })
    }
}

/// Runs a decimator over a full stream.
pub fn decimate(spec: &FirSpec, input: &[FixedPoint]) -> Vec<FixedPoint> {
    let format = input.first().map_or(QFormat::Q1_7, |x| x.format());
    let mut state = DecimatorState::new(format);
    let mut out = Vec::with_capacity(input.len() / 2);
    for &x in input {
        let (y, next) = decimate_step(spec, state, x);
        state = next;
        out.extend(y);
    }
    out
}

/// One analysis level: returns `(approximation, detail)`.
pub fn dwt_level(pair: &DilationPair, input: &[FixedPoint]) -> Result<(Vec<FixedPoint>, Vec<FixedPoint>)> {
    if input.len() < DWT_TAPS {
        return Err(Error::TooShort {
            actual: input.len(),
            minimum: DWT_TAPS,
        });
    }
    if input.len() % 2 != 0 {
        return Err(Error::OddLength(input.len()));
    }
    let format = input[0].format();
    if format.total_bits() != 8 || input.iter().any(|x| x.format() != format) {
        return Err(Error::FormatMismatch {
            left: format.to_string(),
            right: "an 8-bit format".into(),
        });
    }
    let output = level_output_format(format);
    let approx = decimate(&pair.branch_filter(Branch::Lowpass, output), input);
    let detail = decimate(&pair.branch_filter(Branch::Highpass, output), input);
    Ok((approx, detail))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PyramidLevel {
    pub approximation: Vec<FixedPoint>,
    pub detail: Vec<FixedPoint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PyramidOutput {
    pub levels: Vec<PyramidLevel>,
}

/// Mallat pyramid: level `j+1` analyses level `j`'s approximation after
/// rounding it back to an 8-bit format.
pub fn dwt_pyramid(pair: &DilationPair, input: &[FixedPoint], levels: usize) -> Result<PyramidOutput> {
    let bad = || Error::BadLength {
        length: input.len(),
        levels,
    };
    if levels == 0 || levels >= usize::BITS as usize {
        return Err(bad());
    }
    let block = 1usize << levels;
    if input.len() % block != 0 || input.len() / block < DWT_TAPS {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(levels);
    let mut current = input.to_vec();
    for _ in 0..levels {
        let (approximation, detail) = dwt_level(pair, &current)?;
        let next_format = next_level_input_format(approximation[0].format());
        current = approximation
            .iter()
            .map(|a| a.requantize(next_format).0)
            .collect();
        out.push(PyramidLevel {
            approximation,
            detail,
        });
    }
    Ok(PyramidOutput { levels: out })
}
