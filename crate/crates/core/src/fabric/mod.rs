//! The reconfigurable array: a fixed pool of common modules (CMs), a
//! one-hot configuration decoder, per-function netlists and a synchronous
//! executor.

mod build;
mod census;
mod exec;
mod netlist;
mod pool;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cosine::DCT_SAMPLE;
use crate::error::{Error, Result};
use crate::filter::{FirSpec, IirSpec};
use crate::fourier::FftPlan;
use crate::numerics::QFormat;
use crate::wavelet::{Branch, DilationPair};

pub use build::{build, build_dct, build_dwt, build_fft, build_fir, build_iir};
pub use census::{account, census, ResourceReport, ResourceRow};
pub use exec::{execute, run_blocks, run_spectra, run_stream, Execution, Machine};
pub use netlist::{ControlLine, Netlist, NetlistBuilder, Node, NodeId, Op, Timing, Value};
pub use pool::CmPool;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConfigMode {
    Fir,
    Iir,
    Dct,
    Fft,
    Dwt,
}

impl ConfigMode {
    /// Decoder order: `C1..C5`.
    pub const ALL: [ConfigMode; 5] = [ConfigMode::Fir, ConfigMode::Iir, ConfigMode::Dct, ConfigMode::Fft, ConfigMode::Dwt];

    pub fn name(self) -> &'static str {
        match self {
            ConfigMode::Fir => "FIR",
            ConfigMode::Iir => "IIR",
            ConfigMode::Dct => "DCT",
            ConfigMode::Fft => "FFT",
            ConfigMode::Dwt => "DWT",
        }
    }
}

impl fmt::Display for ConfigMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConfigMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConfigMode::ALL
            .iter()
            .copied()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unknown mode {s:?}"),
            })
    }
}

/// Decoder output `C1..C5`: one-hot, or all zero when idle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ControlWord {
    bits: [bool; 5],
}

impl ControlWord {
    pub fn idle() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: [bool; 5]) -> Result<Self> {
        if bits.iter().filter(|&&b| b).count() > 1 {
            return Err(Error::InvalidNetlist(format!("control word {bits:?} is not one-hot")));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> [bool; 5] {
        self.bits
    }

    pub fn mode(&self) -> Option<ConfigMode> {
        self.bits.iter().position(|&b| b).map(|i| ConfigMode::ALL[i])
    }

    pub fn is_idle(&self) -> bool {
        self.mode().is_none()
    }
}

impl fmt::Display for ControlWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Reference control words, in decoder order.
pub const TABLE_III: [(ConfigMode, [u8; 5]); 5] = [
    (ConfigMode::Fir, [1, 0, 0, 0, 0]),
    (ConfigMode::Iir, [0, 1, 0, 0, 0]),
    (ConfigMode::Dct, [0, 0, 1, 0, 0]),
    (ConfigMode::Fft, [0, 0, 0, 1, 0]),
    (ConfigMode::Dwt, [0, 0, 0, 0, 1]),
];

pub fn decode(mode: ConfigMode) -> ControlWord {
    let mut bits = [false; 5];
    bits[mode as usize] = true;
    ControlWord { bits }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CmKind {
    Counter1,
    Adder,
    Lut,
    Subtractor,
    Multiplier,
    Register,
    Mux4,
    Mux2,
}

impl CmKind {
    pub const ALL: [CmKind; 8] = [
        CmKind::Counter1,
        CmKind::Adder,
        CmKind::Lut,
        CmKind::Subtractor,
        CmKind::Multiplier,
        CmKind::Register,
        CmKind::Mux4,
        CmKind::Mux2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CmKind::Counter1 => "counter",
            CmKind::Adder => "adder",
            CmKind::Lut => "lut",
            CmKind::Subtractor => "subtractor",
            CmKind::Multiplier => "multiplier",
            CmKind::Register => "register",
            CmKind::Mux4 => "mux4",
            CmKind::Mux2 => "mux2",
        }
    }
}

impl fmt::Display for CmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A count per CM kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Census {
    pub counter: usize,
    pub adder: usize,
    pub lut: usize,
    pub subtractor: usize,
    pub multiplier: usize,
    pub register: usize,
    pub mux4: usize,
    pub mux2: usize,
}

impl Census {
    pub const fn new(counts: [usize; 8]) -> Self {
        let [counter, adder, lut, subtractor, multiplier, register, mux4, mux2] = counts;
        Self {
            counter,
            adder,
            lut,
            subtractor,
            multiplier,
            register,
            mux4,
            mux2,
        }
    }

    pub fn get(&self, kind: CmKind) -> usize {
        match kind {
            CmKind::Counter1 => self.counter,
            CmKind::Adder => self.adder,
            CmKind::Lut => self.lut,
            CmKind::Subtractor => self.subtractor,
            CmKind::Multiplier => self.multiplier,
            CmKind::Register => self.register,
            CmKind::Mux4 => self.mux4,
            CmKind::Mux2 => self.mux2,
        }
    }

    pub fn get_mut(&mut self, kind: CmKind) -> &mut usize {
        match kind {
            CmKind::Counter1 => &mut self.counter,
            CmKind::Adder => &mut self.adder,
            CmKind::Lut => &mut self.lut,
            CmKind::Subtractor => &mut self.subtractor,
            CmKind::Multiplier => &mut self.multiplier,
            CmKind::Register => &mut self.register,
            CmKind::Mux4 => &mut self.mux4,
            CmKind::Mux2 => &mut self.mux2,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (CmKind, usize)> + '_ {
        CmKind::ALL.iter().map(move |&k| (k, self.get(k)))
    }

    pub fn total(&self) -> usize {
        self.iter().map(|(_, n)| n).sum()
    }
}

/// Pool sizes: counter, adders, LUTs, subtractors and multipliers as
/// given for the combined array; registers and multiplexers are the
/// per-mode maxima.
pub const POOL_CAPACITY: Census = Census::new([1, 62, 94, 36, 24, 48, 16, 14]);

/// Reference per-mode counts.
pub const TABLE_IV: [(ConfigMode, Census); 5] = [
    (ConfigMode::Fir, Census::new([0, 31, 32, 0, 0, 16, 0, 1])),
    (ConfigMode::Iir, Census::new([0, 62, 62, 0, 0, 31, 0, 1])),
    (ConfigMode::Dwt, Census::new([1, 8, 8, 0, 0, 9, 0, 0])),
    (ConfigMode::Fft, Census::new([0, 16, 0, 24, 24, 48, 16, 14])),
    (ConfigMode::Dct, Census::new([0, 44, 24, 36, 0, 32, 0, 8])),
];

pub fn table_iv(mode: ConfigMode) -> Census {
    TABLE_IV.iter().find(|(m, _)| *m == mode).map(|(_, c)| *c).expect("every mode is tabulated")
}

/// Parameters for one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionSpec {
    Fir(FirSpec),
    Iir(IirSpec),
    Dwt {
        pair: DilationPair,
        branch: Branch,
        input: QFormat,
    },
    Fft(FftPlan),
    Dct,
}

impl FunctionSpec {
    pub fn mode(&self) -> ConfigMode {
        match self {
            FunctionSpec::Fir(_) => ConfigMode::Fir,
            FunctionSpec::Iir(_) => ConfigMode::Iir,
            FunctionSpec::Dwt { .. } => ConfigMode::Dwt,
            FunctionSpec::Fft(_) => ConfigMode::Fft,
            FunctionSpec::Dct => ConfigMode::Dct,
        }
    }

    /// Level-one lowpass decimator with the Daubechies pair.
    pub fn default_dwt() -> Self {
        FunctionSpec::Dwt {
            pair: DilationPair::daubechies8(),
            branch: Branch::Lowpass,
            input: QFormat::Q1_7,
        }
    }

    /// Sample format the configured datapath expects.
    pub fn input_format(&self) -> QFormat {
        match self {
            FunctionSpec::Fir(_) | FunctionSpec::Iir(_) => QFormat::Q1_7,
            FunctionSpec::Dwt { input, .. } => *input,
            FunctionSpec::Fft(_) => QFormat::Q2_13,
            FunctionSpec::Dct => DCT_SAMPLE,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoder_matches_table() {
        for (mode, bits) in TABLE_III {
            let word = decode(mode);
            assert_eq!(word.bits().map(u8::from), bits);
            assert_eq!(word.mode(), Some(mode));
        }
        assert_eq!(decode(ConfigMode::Fir).to_string(), "10000");
        assert_eq!(decode(ConfigMode::Dwt).to_string(), "00001");
        assert!(ControlWord::idle().is_idle());
        assert!(ControlWord::from_bits([true, true, false, false, false]).is_err());
        assert_eq!("fft".parse::<ConfigMode>().unwrap(), ConfigMode::Fft);
        assert!("fir2".parse::<ConfigMode>().is_err());
    }

    #[test]
    fn census_accessors() {
        let mut c = Census::default();
        *c.get_mut(CmKind::Mux4) += 3;
        assert_eq!(c.get(CmKind::Mux4), 3);
        assert_eq!(c.total(), 3);
        assert_eq!(POOL_CAPACITY.lut, 94);
        assert_eq!(table_iv(ConfigMode::Fft).mux4, 16);
    }
}
