//! Optional TOML settings for `run`, `resources` and `netlist`.
//!
//! ```toml
//! [fft]
//! stage_scaling = true
//!
//! [dwt]
//! branch = "highpass"
//! input = "Q2.6"
//!
//! [pool]
//! multiplier = 12
//! ```

use std::path::Path;

use fpda_core::fabric::{Census, POOL_CAPACITY};
use fpda_core::formats::parse_qformat;
use fpda_core::numerics::QFormat;
use fpda_core::wavelet::Branch;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub fft: FftConfig,
    pub dwt: DwtConfig,
    pub pool: PoolConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FftConfig {
    pub stage_scaling: bool,
    pub scalable: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchName {
    #[default]
    Lowpass,
    Highpass,
}

impl From<BranchName> for Branch {
    fn from(b: BranchName) -> Self {
        match b {
            BranchName::Lowpass => Branch::Lowpass,
            BranchName::Highpass => Branch::Highpass,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DwtConfig {
    pub branch: BranchName,
    /// 8-bit sample format, `Q1.7` when absent.
    pub input: Option<String>,
}

impl DwtConfig {
    pub fn input_format(&self) -> Result<QFormat, CliError> {
        match &self.input {
            None => Ok(QFormat::Q1_7),
            Some(s) => {
                let f = parse_qformat(s).map_err(|e| CliError::parse(format!("dwt.input: {e}")))?;
                if f.total_bits() != 8 {
                    return Err(CliError::parse(format!("dwt.input: {f} is not an 8-bit format")));
                }
                Ok(f)
            }
        }
    }
}

/// Capacity overrides; unset kinds keep the standard pool size.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoolConfig {
    pub counter: Option<usize>,
    pub adder: Option<usize>,
    pub lut: Option<usize>,
    pub subtractor: Option<usize>,
    pub multiplier: Option<usize>,
    pub register: Option<usize>,
    pub mux4: Option<usize>,
    pub mux2: Option<usize>,
}

impl PoolConfig {
    pub fn capacity(&self) -> Census {
        let d = POOL_CAPACITY;
        Census {
            counter: self.counter.unwrap_or(d.counter),
            adder: self.adder.unwrap_or(d.adder),
            lut: self.lut.unwrap_or(d.lut),
            subtractor: self.subtractor.unwrap_or(d.subtractor),
            multiplier: self.multiplier.unwrap_or(d.multiplier),
            register: self.register.unwrap_or(d.register),
            mux4: self.mux4.unwrap_or(d.mux4),
            mux2: self.mux2.unwrap_or(d.mux2),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::parse(format!("config: {e}")))
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => Self::parse(&crate::read_file(p)?),
        }
    }
}
