//! Turns a mode plus optional coefficient files into a configuration.

use std::path::{Path, PathBuf};

use fpda_core::fabric::{ConfigMode, FunctionSpec};
use fpda_core::filter::{FirSpec, IirSpec};
use fpda_core::formats::parse_reals;
use fpda_core::fourier::FftPlan;
use fpda_core::wavelet::DilationPair;

use crate::config::Config;
use crate::{read_file, CliError};

pub const DEFAULT_FIR_TAP: f64 = 1.0 / 16.0;
pub const DEFAULT_IIR_FORWARD: f64 = 1.0 / 32.0;
pub const DEFAULT_IIR_FEEDBACK: f64 = 0.05;

fn values(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = read_file(path)?;
    let v = parse_reals(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    Ok(v.into_iter().map(|(_, x)| x).collect())
}

fn invalid(e: fpda_core::Error) -> CliError {
    CliError::parse(format!("coefficients: {e}"))
}

/// * FIR: one file of up to 16 taps
/// * IIR: forward taps, then feedback taps `b1..`
/// * DWT: 16 values, the highpass taps then the lowpass taps
pub fn function_spec(mode: ConfigMode, coeffs: &[PathBuf], config: &Config) -> Result<FunctionSpec, CliError> {
    let expect = |n: usize| {
        if coeffs.len() > n {
            Err(CliError::parse(format!("{mode} takes at most {n} --coeffs file(s), got {}", coeffs.len())))
        } else {
            Ok(())
        }
    };
    Ok(match mode {
        ConfigMode::Fir => {
            expect(1)?;
            let taps = match coeffs.first() {
                Some(p) => values(p)?,
                None => vec![DEFAULT_FIR_TAP; 16],
            };
            FunctionSpec::Fir(FirSpec::from_values(&taps).map_err(invalid)?)
        }
        ConfigMode::Iir => {
            expect(2)?;
            let (a, b) = match coeffs {
                [] => (vec![DEFAULT_IIR_FORWARD; 16], vec![DEFAULT_IIR_FEEDBACK; 15]),
                [f, b] => (values(f)?, values(b)?),
                _ => return Err(CliError::parse("iir needs two --coeffs files: forward, then feedback")),
            };
            FunctionSpec::Iir(IirSpec::from_values(&a, &b).map_err(invalid)?)
        }
        ConfigMode::Dwt => {
            expect(1)?;
            let pair = match coeffs.first() {
                None => DilationPair::daubechies8(),
                Some(p) => {
                    let v = values(p)?;
                    if v.len() != 16 {
                        return Err(CliError::parse(format!("dwt coefficients: expected 16 values, got {}", v.len())));
                    }
                    DilationPair::from_values(&v[..8], &v[8..]).map_err(invalid)?
                }
            };
            FunctionSpec::Dwt {
                pair,
                branch: config.dwt.branch.into(),
                input: config.dwt.input_format()?,
            }
        }
        ConfigMode::Fft => {
            expect(0)?;
            FunctionSpec::Fft(
                FftPlan::new()
                    .with_stage_scaling(config.fft.stage_scaling)
                    .with_scalable(config.fft.scalable),
            )
        }
        ConfigMode::Dct => {
            expect(0)?;
            FunctionSpec::Dct
        }
    })
}
