//! Mode-independent plumbing: inputs, fabric runs, kernel runs and oracle
//! references, all flattened to sample lists (complex values as `re, im`).

use fpda_core::cosine::{dct16, dct2d, DCT2D_OUTPUT};
use fpda_core::fabric::{run_blocks, run_spectra, run_stream, ConfigMode, FunctionSpec, Netlist};
use fpda_core::filter::{fir_filter, iir_filter};
use fpda_core::fourier::fft16;
use fpda_core::numerics::{ComplexFixed, FixedPoint, QFormat};
use fpda_core::oracle::{analysis_level, conv_direct, dct2d_direct, dct_direct, dft_direct, iir_direct, ToleranceSpec};
use fpda_core::wavelet::{decimate, level_output_format};
use fpda_core::{RealComplex, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    /// FIR, IIR and DWT streams.
    Stream(Vec<FixedPoint>),
    /// 16-point FFT frames.
    Frames(Vec<Vec<ComplexFixed>>),
    /// 16-sample DCT rows.
    Rows(Vec<Vec<FixedPoint>>),
    /// 16x16 blocks for the separable 2-D DCT.
    Blocks(Vec<Vec<Vec<FixedPoint>>>),
}

impl Input {
    /// Scalar sample count; complex samples count once.
    pub fn len(&self) -> usize {
        match self {
            Input::Stream(x) => x.len(),
            Input::Frames(f) => f.iter().map(Vec::len).sum(),
            Input::Rows(r) => r.iter().map(Vec::len).sum(),
            Input::Blocks(b) => b.iter().flatten().map(Vec::len).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn tolerance(mode: ConfigMode) -> ToleranceSpec {
    ToleranceSpec::lsb(match mode {
        ConfigMode::Fir => 1.0,
        ConfigMode::Iir => 4.0,
        ConfigMode::Dwt => 8.0,
        ConfigMode::Fft => 4.0,
        ConfigMode::Dct => 4.0,
    })
}

/// Tolerance in LSB for a run over `input`; 2-D blocks get the wider bound.
pub fn tolerance_for(mode: ConfigMode, input: &Input) -> f64 {
    match input {
        Input::Blocks(_) => 8.0,
        _ => tolerance(mode).max_abs_lsb,
    }
}

fn flat_complex(frames: &[Vec<ComplexFixed>]) -> Vec<FixedPoint> {
    frames.iter().flatten().flat_map(|z| [z.re(), z.im()]).collect()
}

fn values(x: &[FixedPoint]) -> Vec<f64> {
    x.iter().map(|v| v.value()).collect()
}

fn mismatch(spec: &FunctionSpec) -> fpda_core::Error {
    fpda_core::Error::FormatMismatch {
        left: spec.mode().to_string(),
        right: "input shape".into(),
    }
}

/// Runs the configured netlist. 2-D blocks cannot be streamed through the
/// single-pass datapath and are rejected.
pub fn fabric(net: &Netlist, spec: &FunctionSpec, input: &Input) -> Result<(Vec<FixedPoint>, usize)> {
    match (spec, input) {
        (FunctionSpec::Fir(_) | FunctionSpec::Iir(_) | FunctionSpec::Dwt { .. }, Input::Stream(x)) => run_stream(net, x),
        (FunctionSpec::Fft(_), Input::Frames(f)) => {
            let (y, sat) = run_spectra(net, f)?;
            Ok((flat_complex(&y), sat))
        }
        (FunctionSpec::Dct, Input::Rows(r)) => {
            let (y, sat) = run_blocks(net, r)?;
            Ok((y.into_iter().flatten().collect(), sat))
        }
        _ => Err(mismatch(spec)),
    }
}

/// Behavioral kernels.
pub fn kernel(spec: &FunctionSpec, input: &Input) -> Result<Vec<FixedPoint>> {
    match (spec, input) {
        (FunctionSpec::Fir(s), Input::Stream(x)) => Ok(fir_filter(s, x)),
        (FunctionSpec::Iir(s), Input::Stream(x)) => Ok(iir_filter(s, x)),
        (FunctionSpec::Dwt { pair, branch, input }, Input::Stream(x)) => {
            Ok(decimate(&pair.branch_filter(*branch, level_output_format(*input)), x))
        }
        (FunctionSpec::Fft(plan), Input::Frames(f)) => {
            let y = f.iter().map(|frame| fft16(plan, frame)).collect::<Result<Vec<_>>>()?;
            Ok(flat_complex(&y))
        }
        (FunctionSpec::Dct, Input::Rows(r)) => Ok(r.iter().map(|row| dct16(row)).collect::<Result<Vec<_>>>()?.concat()),
        (FunctionSpec::Dct, Input::Blocks(b)) => {
            let y = b.iter().map(|block| dct2d(block)).collect::<Result<Vec<_>>>()?;
            Ok(y.into_iter().flatten().flatten().collect())
        }
        _ => Err(mismatch(spec)),
    }
}

/// Double-precision reference using the quantized coefficients.
pub fn oracle(spec: &FunctionSpec, input: &Input) -> Result<Vec<f64>> {
    match (spec, input) {
        (FunctionSpec::Fir(s), Input::Stream(x)) => {
            let mut y = conv_direct(&values(s.taps()), &values(x));
            y.truncate(x.len());
            Ok(y)
        }
        (FunctionSpec::Iir(s), Input::Stream(x)) => Ok(iir_direct(
            &values(s.forward().taps()),
            &values(s.feedback()),
            &values(x),
            |v| v,
        )),
        (FunctionSpec::Dwt { pair, branch, .. }, Input::Stream(x)) => {
            Ok(analysis_level(&values(x), &values(pair.taps(*branch))))
        }
        (FunctionSpec::Fft(plan), Input::Frames(f)) => {
            let scale = if plan.stage_scaling() { 1.0 / 16.0 } else { 1.0 };
            Ok(f.iter()
                .flat_map(|frame| {
                    let z: Vec<RealComplex> = frame.iter().map(|c| RealComplex::new(c.re().value(), c.im().value())).collect();
                    dft_direct(&z).into_iter().flat_map(move |c| [c.re * scale, c.im * scale])
                })
                .collect())
        }
        (FunctionSpec::Dct, Input::Rows(r)) => Ok(r.iter().flat_map(|row| dct_direct(&values(row))).collect()),
        (FunctionSpec::Dct, Input::Blocks(b)) => Ok(b
            .iter()
            .flat_map(|block| {
                let v: Vec<Vec<f64>> = block.iter().map(|row| values(row)).collect();
                dct2d_direct(&v).into_iter().flatten()
            })
            .collect()),
        _ => Err(mismatch(spec)),
    }
}

/// Output format of a run, used to express errors in LSB.
pub fn output_format(net: &Netlist, input: &Input) -> QFormat {
    match input {
        Input::Blocks(_) => DCT2D_OUTPUT,
        _ => net.output_format,
    }
}
