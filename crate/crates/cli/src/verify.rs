//! Randomized equivalence checks behind `verify-all`.

use std::fmt::Write as _;

use fpda_core::fabric::{build, ConfigMode, FunctionSpec};
use fpda_core::filter::{FirSpec, IirSpec};
use fpda_core::fourier::FftPlan;
use fpda_core::numerics::QFormat;
use fpda_core::oracle::max_error_lsb;
use fpda_core::wavelet::{Branch, DilationPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::io::random_input;
use crate::pipeline::{self, Input};

/// A random configuration and a matching random input. IIR feedback keeps
/// `sum |b| <= 0.9` and the forward gain is scaled so the output stays in
/// range.
pub fn random_case(mode: ConfigMode, rng: &mut ChaCha8Rng) -> (FunctionSpec, Input) {
    let spec = match mode {
        ConfigMode::Fir => {
            let taps: Vec<f64> = (0..rng.gen_range(1..=16)).map(|_| rng.gen_range(-1.0..0.99)).collect();
            FunctionSpec::Fir(FirSpec::from_values(&taps).expect("taps in range"))
        }
        ConfigMode::Iir => FunctionSpec::Iir(random_iir(rng)),
        ConfigMode::Dwt => FunctionSpec::Dwt {
            pair: DilationPair::daubechies8(),
            branch: if rng.gen() { Branch::Lowpass } else { Branch::Highpass },
            input: if rng.gen() { QFormat::Q1_7 } else { QFormat::new(2, 6).expect("8 bits") },
        },
        ConfigMode::Fft => FunctionSpec::Fft(FftPlan::new().with_stage_scaling(rng.gen())),
        ConfigMode::Dct => FunctionSpec::Dct,
    };
    let input = match mode {
        ConfigMode::Fir | ConfigMode::Iir | ConfigMode::Dwt => {
            let format = spec.input_format();
            let n = if mode == ConfigMode::Iir { 200 } else { 256 };
            Input::Stream(
                (0..n)
                    .map(|_| {
                        let raw = rng.gen_range(format.min_raw()..=format.max_raw());
                        fpda_core::FixedPoint::from_raw(raw, format).expect("in range")
                    })
                    .collect(),
            )
        }
        _ => random_input(mode, spec.input_format(), false, rng),
    };
    (spec, input)
}

pub fn random_iir(rng: &mut impl Rng) -> IirSpec {
    let len = rng.gen_range(2..=16);
    let budget = rng.gen_range(0.0..0.9);
    let scaled = |rng: &mut dyn rand::RngCore, n: usize, total: f64| -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = raw.iter().map(|v: &f64| v.abs()).sum::<f64>().max(1e-9);
        raw.iter().map(|v| v * total / norm).collect()
    };
    let feedback = scaled(rng, len - 1, budget);
    let forward = scaled(rng, len, 0.9 * (1.0 - budget));
    IirSpec::from_values(&forward, &feedback).expect("coefficients in range")
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub cases: usize,
    pub failures: usize,
    /// Worst error in output LSB where meaningful.
    pub worst_lsb: Option<f64>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Netlist output equals the behavioral kernel, sample for sample.
pub fn fabric_equivalence(mode: ConfigMode, streams: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..streams {
        let (spec, input) = random_case(mode, &mut rng);
        let same = build(&spec)
            .and_then(|net| pipeline::fabric(&net, &spec, &input))
            .and_then(|(y, _)| Ok(y == pipeline::kernel(&spec, &input)?));
        if !matches!(same, Ok(true)) {
            failures += 1;
        }
    }
    CheckOutcome {
        check: "fabric=kernel".into(),
        cases: streams,
        failures,
        worst_lsb: None,
    }
}

/// Kernel output against the double-precision oracle.
pub fn oracle_accuracy(mode: ConfigMode, streams: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let tol = pipeline::tolerance(mode).max_abs_lsb;
    let (mut failures, mut worst) = (0, 0.0f64);
    for _ in 0..streams {
        let (spec, input) = random_case(mode, &mut rng);
        let err = (|| -> fpda_core::Result<f64> {
            let net = build(&spec)?;
            let y: Vec<f64> = pipeline::kernel(&spec, &input)?.iter().map(|v| v.value()).collect();
            let r = pipeline::oracle(&spec, &input)?;
            Ok(max_error_lsb(&r, &y, net.output_format.lsb()))
        })();
        match err {
            Ok(e) => {
                worst = worst.max(e);
                if e > tol {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    CheckOutcome {
        check: "kernel~oracle".into(),
        cases: streams,
        failures,
        worst_lsb: Some(worst),
    }
}

/// Census rows either match the reference counts or carry a note.
pub fn resources_explained(mode: ConfigMode) -> CheckOutcome {
    let ok = crate::resources(mode, &Default::default()).map(|r| r.mismatches_explained()).unwrap_or(false);
    CheckOutcome {
        check: "resources".into(),
        cases: 1,
        failures: usize::from(!ok),
        worst_lsb: None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixRow {
    pub mode: ConfigMode,
    pub checks: Vec<CheckOutcome>,
}

pub fn verify_all(streams: usize, seed: u64) -> Vec<MatrixRow> {
    ConfigMode::ALL
        .iter()
        .enumerate()
        .map(|(i, &mode)| {
            let s = seed.wrapping_add(i as u64);
            MatrixRow {
                mode,
                checks: vec![
                    fabric_equivalence(mode, streams, s),
                    oracle_accuracy(mode, streams, s),
                    resources_explained(mode),
                ],
            }
        })
        .collect()
}

pub fn render_matrix(rows: &[MatrixRow]) -> String {
    let mut s = String::new();
    let Some(first) = rows.first() else { return s };
    let _ = write!(s, "{:<5}", "mode");
    for c in &first.checks {
        let _ = write!(s, " {:>14}", c.check);
    }
    s.push('\n');
    for row in rows {
        let _ = write!(s, "{:<5}", row.mode.to_string());
        for c in &row.checks {
            let cell = if c.passed() {
                "pass".to_string()
            } else {
                format!("FAIL {}/{}", c.failures, c.cases)
            };
            let _ = write!(s, " {cell:>14}");
        }
        s.push('\n');
    }
    s
}
