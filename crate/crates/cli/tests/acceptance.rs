//! One line per acceptance criterion. Exits non-zero if any fails.

use std::cell::Cell;
use std::time::{Duration, Instant};

use fpda_cli::config::Config;
use fpda_cli::verify::{fabric_equivalence, random_iir};
use fpda_cli::{modes, resources, OutputFormat};
use fpda_core::cosine::{dct16, derive_decomposition, printed_even_even, DCT_SAMPLE};
use fpda_core::da::{build_unit, da_dot};
use fpda_core::fabric::{census, decode, CmKind, CmPool, ConfigMode, FunctionSpec, POOL_CAPACITY, TABLE_III};
use fpda_core::filter::{expand_feedback_coefficients, fir_filter, iir_filter, FirSpec, FIR_OUTPUT, SAMPLE};
use fpda_core::fourier::{complex_mul3_raw, dft_naive, fft16, FftPlan, TwiddleEntry};
use fpda_core::numerics::{ComplexFixed, FixedPoint, QFormat};
use fpda_core::oracle::{conv_direct, dct_direct, dwt_direct, iir_direct, max_error_lsb, round_to_grid};
use fpda_core::wavelet::{decimate, dwt_level, dwt_pyramid, level_output_format, next_level_input_format, Branch, DilationPair, DAUBECHIES8_H0, DAUBECHIES8_L0};
use fpda_core::{Error, Exact};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Check {
    let t = start.elapsed();
    ensure(t <= limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn values(x: &[FixedPoint]) -> Vec<f64> {
    x.iter().map(|v| v.value()).collect()
}

fn q17(rng: &mut impl Rng, n: usize) -> Vec<FixedPoint> {
    (0..n).map(|_| FixedPoint::from_raw(rng.gen_range(-128..128), SAMPLE).unwrap()).collect()
}

fn table_iv_reproduction() -> Check {
    let start = Instant::now();
    let config = Config::default();
    let printed: [(ConfigMode, &[(CmKind, usize)]); 4] = [
        (ConfigMode::Fir, &[(CmKind::Adder, 31), (CmKind::Lut, 32), (CmKind::Register, 16), (CmKind::Mux2, 1)]),
        (ConfigMode::Iir, &[(CmKind::Adder, 62), (CmKind::Lut, 62), (CmKind::Register, 31), (CmKind::Mux2, 1)]),
        (
            ConfigMode::Fft,
            &[(CmKind::Adder, 16), (CmKind::Subtractor, 24), (CmKind::Register, 48), (CmKind::Mux4, 16), (CmKind::Mux2, 14), (CmKind::Multiplier, 24)],
        ),
        (
            ConfigMode::Dct,
            &[(CmKind::Adder, 44), (CmKind::Lut, 24), (CmKind::Subtractor, 36), (CmKind::Register, 32), (CmKind::Mux2, 8)],
        ),
    ];
    for (mode, cells) in printed {
        let r = resources(mode, &config).map_err(|e| e.message)?;
        ensure(r.all_match(), || format!("{mode}: a row differs from the table"))?;
        for &(kind, n) in cells {
            ensure(r.row(kind).used == n, || format!("{mode} {kind}: {} != {n}", r.row(kind).used))?;
        }
    }
    let dwt = resources(ConfigMode::Dwt, &config).map_err(|e| e.message)?;
    for row in &dwt.rows {
        if row.kind == CmKind::Lut {
            ensure(row.used == 16 && row.expected == 8, || "dwt lut cell is not 16 vs 8".into())?;
        } else {
            ensure(row.matches, || format!("dwt {} differs", row.kind))?;
        }
    }
    ensure(
        dwt.notes.iter().any(|n| n.starts_with("lut:") && n.contains("16") && n.contains('8')),
        || "dwt lut note missing".into(),
    )?;
    within(Duration::from_secs(1), start)
}

fn table_iii_reproduction() -> Check {
    let printed = ["10000", "01000", "00100", "00010", "00001"];
    for ((mode, bits), word) in TABLE_III.iter().zip(printed) {
        let d = decode(*mode);
        ensure(d.to_string() == word, || format!("{mode}: {d} != {word}"))?;
        ensure(d.bits().map(u8::from) == *bits, || format!("{mode}: bits differ"))?;
    }
    let listing = modes(OutputFormat::Text);
    ensure(listing.lines().count() == 5, || "modes does not list five lines".into())?;
    ensure(printed.iter().all(|w| listing.contains(w)), || "modes listing lacks a word".into())
}

fn da_exactness() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let coeff = |r: i64| FixedPoint::from_raw(r, QFormat::Q1_15).unwrap();
    let mac = |c: &[i64], x: &[i64]| -> i64 { c.iter().zip(x).map(|(a, b)| a * b).sum() };
    let mut mismatches = 0;
    let raws: Vec<i64> = (0..4).map(|_| rng.gen_range(-32768..32768)).collect();
    let units: Vec<_> = raws.iter().map(|&r| build_unit(coeff(r))).collect();
    for word in 0u32..(1 << 16) {
        let x: Vec<i64> = (0..4).map(|k| (((word >> (4 * k)) & 0xF) as i64 ^ 8) - 8).collect();
        let s: Vec<FixedPoint> = x.iter().map(|&v| FixedPoint::from_raw(v, SAMPLE).unwrap()).collect();
        if da_dot(&units, &s).map_err(|e| e.to_string())?.raw() != mac(&raws, &x) {
            mismatches += 1;
        }
    }
    for _ in 0..100_000 {
        let raws: Vec<i64> = (0..16).map(|_| rng.gen_range(-32768..32768)).collect();
        let x: Vec<i64> = (0..16).map(|_| rng.gen_range(-128..128)).collect();
        let units: Vec<_> = raws.iter().map(|&r| build_unit(coeff(r))).collect();
        let s: Vec<FixedPoint> = x.iter().map(|&v| FixedPoint::from_raw(v, SAMPLE).unwrap()).collect();
        if da_dot(&units, &s).map_err(|e| e.to_string())?.raw() != mac(&raws, &x) {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches"))?;
    within(Duration::from_secs(10), start)
}

fn fir_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let taps: Vec<f64> = (0..rng.gen_range(1..=16)).map(|_| rng.gen_range(-1.0..0.99)).collect();
        let spec = FirSpec::from_values(&taps).map_err(|e| e.to_string())?;
        let x = q17(&mut rng, 256);
        let y = fir_filter(&spec, &x);
        let want = conv_direct(&values(spec.taps()), &values(&x));
        worst = worst.max(max_error_lsb(&want[..256], &values(&y), FIR_OUTPUT.lsb()));
    }
    ensure(worst <= 1.0, || format!("worst {worst} LSB"))?;
    within(Duration::from_secs(30), start)
}

fn r(n: i64, d: i64) -> Exact {
    Exact::new(BigInt::from(n), BigInt::from(d))
}

fn iir_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let spec = random_iir(&mut rng);
        let x = q17(&mut rng, 200);
        let y = iir_filter(&spec, &x);
        let want = iir_direct(&values(spec.forward().taps()), &values(spec.feedback()), &values(&x), |v| v);
        worst = worst.max(max_error_lsb(&want, &values(&y), SAMPLE.lsb()));
    }
    ensure(worst <= 4.0, || format!("worst {worst} LSB"))?;

    // Three taps with exact rationals: y2 by recursion against the
    // hand-substituted expansion.
    for _ in 0..100 {
        let mut small = || r(rng.gen_range(-9..=9), rng.gen_range(1..=9));
        let (a0, a1, a2, b1, b2) = (small(), small(), small(), small(), small());
        let (x0, x1, x2) = (small(), small(), small());
        let a = [a0.clone(), a1.clone(), a2.clone()];
        let b = [b1.clone(), b2.clone()];
        let y = iir_direct(&a, &b, &[x0.clone(), x1.clone(), x2.clone()], |v| v);
        let y0 = &a0 * &x0;
        let y1 = &a0 * &x1 + &a1 * &x0 + &b1 * &y0;
        let recursion = (&a0 * &x2 + &a1 * &x1 + &a2 * &x0) + (&b1 * &y1 + &b2 * &y0);
        let h0 = a0.clone();
        let h1 = &a1 + &b1 * &a0;
        let h2 = &a2 + &b1 * &a1 + (&b1 * &b1 + &b2) * &a0;
        let expanded = &h0 * &x2 + &h1 * &x1 + &h2 * &x0;
        ensure(y[2] == recursion && recursion == expanded, || "3-tap algebra differs".into())?;
        ensure(expand_feedback_coefficients(&a, &b, 3) == vec![h0, h1, h2], || "3-tap expansion differs".into())?;
    }
    Ok(())
}

fn fft_correctness() -> Check {
    let start = Instant::now();
    let plan = FftPlan::new();
    let q = QFormat::Q2_13;
    let err = |a: &[ComplexFixed], b: &[ComplexFixed]| {
        a.iter()
            .zip(b)
            .flat_map(|(x, y)| [(x.re().raw() - y.re().raw()).abs(), (x.im().raw() - y.im().raw()).abs()])
            .max()
            .unwrap_or(0)
    };
    let run = |x: &[ComplexFixed]| -> Result<(Vec<ComplexFixed>, Vec<ComplexFixed>), String> {
        Ok((fft16(&plan, x).map_err(|e| e.to_string())?, dft_naive(x, 16).map_err(|e| e.to_string())?))
    };
    for k in 0..16 {
        let mut x = vec![ComplexFixed::zero(q); 16];
        x[k] = ComplexFixed::from_raw(8192, 0, q).unwrap();
        let (y, want) = run(&x)?;
        ensure(err(&y, &want) <= 4, || format!("basis {k}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let x: Vec<ComplexFixed> = (0..16)
            .map(|_| ComplexFixed::from_raw(rng.gen_range(-16384..16384), rng.gen_range(-16384..16384), q).unwrap())
            .collect();
        let (y, want) = run(&x)?;
        ensure(err(&y, &want) <= 4, || "random vector above 4 LSB".into())?;
        let energy = |v: &[ComplexFixed]| v.iter().map(|z| z.re().value().powi(2) + z.im().value().powi(2)).sum::<f64>();
        let (ex, ey) = (energy(&x), energy(&y) / 16.0);
        ensure((ey - ex).abs() <= 0.005 * ex, || format!("Parseval {ey} vs {ex}"))?;
    }
    let (y, _) = run(&vec![ComplexFixed::from_raw(8192, 0, q).unwrap(); 16])?;
    ensure((y[0].re().value() - 16.0).abs() <= 4.0 * 2f64.powi(-13), || "X[0] is not 16".into())?;
    ensure(y[1..].iter().all(|z| z.re().raw().abs() <= 4 && z.im().raw().abs() <= 4), || "constant leaks".into())?;

    for _ in 0..100_000 {
        let (a, b) = (rng.gen_range(-(1i64 << 19)..(1 << 19)), rng.gen_range(-(1i64 << 19)..(1 << 19)));
        let w = TwiddleEntry::from_angle(rng.gen_range(-3.15..3.15));
        let [cms, cps, c] = w.raw();
        let s = cps - c;
        let calls = Cell::new(0);
        let got = complex_mul3_raw(a as i128, b as i128, [cms, cps, c].map(i128::from), &mut |x, y| {
            calls.set(calls.get() + 1);
            x * y
        });
        let (a, b, c, s) = (a as i128, b as i128, c as i128, s as i128);
        ensure(calls.get() == 3, || format!("{} multiplications", calls.get()))?;
        ensure(got == (a * c - b * s, a * s + b * c), || "differs from the four-multiplier product".into())?;
    }
    within(Duration::from_secs(10), start)
}

fn dct_correctness() -> Check {
    let dec = derive_decomposition(16).map_err(|e| e.to_string())?;
    ensure(dec.even_even == printed_even_even(), || "even_even differs from the printed block".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let x: Vec<f64> = (0..16).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let got = dec.apply(&x).map_err(|e| e.to_string())?;
        ensure(got.iter().zip(dct_direct(&x)).all(|(a, b)| (a - b).abs() <= 1e-9), || "decomposition off".into())?;
    }
    for _ in 0..1000 {
        let x: Vec<FixedPoint> = (0..16).map(|_| FixedPoint::from_raw(rng.gen_range(-16384..16384), DCT_SAMPLE).unwrap()).collect();
        let y = dct16(&x).map_err(|e| e.to_string())?;
        let e = max_error_lsb(&dct_direct(&values(&x)), &values(&y), DCT_SAMPLE.lsb());
        ensure(e <= 4.0, || format!("{e} LSB"))?;
    }
    let y = dct16(&vec![FixedPoint::from_raw(8192, DCT_SAMPLE).unwrap(); 16]).map_err(|e| e.to_string())?;
    // The quantization allowance covers the Q2.13 output step and the Q1.15
    // rounding of the Y0 coefficient.
    let allowance = DCT_SAMPLE.lsb() + 8.0 * 2f64.powi(-16);
    ensure((y[0].value() - std::f64::consts::SQRT_2).abs() <= allowance, || format!("Y0 = {}", y[0].value()))?;
    ensure(y[1..].iter().all(|v| v.raw().abs() <= 1), || "a non-DC bin exceeds 1 LSB".into())
}

#[allow(clippy::approx_constant)]
fn dwt_correctness() -> Check {
    let pair = DilationPair::daubechies8();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [0usize, 1, 9, 64, 65, 200] {
        let x = q17(&mut rng, n);
        for branch in [Branch::Lowpass, Branch::Highpass] {
            let spec = pair.branch_filter(branch, level_output_format(SAMPLE));
            let kept: Vec<FixedPoint> = fir_filter(&spec, &x).into_iter().step_by(2).take(n / 2).collect();
            let got = decimate(&spec, &x);
            ensure(got.len() == n / 2, || format!("{n} inputs gave {} outputs", got.len()))?;
            ensure(got == kept, || "decimator differs from the FIR slice".into())?;
        }
    }
    let lsb = level_output_format(SAMPLE).lsb();
    let low: f64 = DAUBECHIES8_L0.iter().sum();
    let high: f64 = DAUBECHIES8_H0.iter().sum();
    let (a, d) = dwt_level(&pair, &vec![FixedPoint::from_raw(-128, SAMPLE).unwrap(); 64]).map_err(|e| e.to_string())?;
    ensure(a[4..].iter().all(|v| (-v.value() - low).abs() <= 8.0 * lsb), || "lowpass steady state".into())?;
    ensure(a[4..].iter().all(|v| (-v.value() - 1.4142).abs() <= 8.0 * lsb), || "lowpass is not 1.4142".into())?;
    ensure(d[4..].iter().all(|v| (-v.value() - high).abs() <= 8.0 * lsb), || "highpass steady state".into())?;
    ensure(d[4..].iter().all(|v| v.value().abs() <= 2e-4 + 8.0 * lsb), || "highpass is not 0".into())?;

    // Double-precision cascade, quantized at each level like the pyramid.
    let (lo, hi) = (values(pair.l0()), values(pair.h0()));
    let between = |level: usize, v: f64| {
        let mut f = SAMPLE;
        for _ in 0..level {
            f = next_level_input_format(level_output_format(f));
        }
        let out = level_output_format(f);
        round_to_grid(round_to_grid(v, out.fraction_bits() as u32), next_level_input_format(out).fraction_bits() as u32)
    };
    for _ in 0..200 {
        let x = q17(&mut rng, 64);
        let out = dwt_pyramid(&pair, &x, 3).map_err(|e| e.to_string())?;
        let cascade = dwt_direct(&values(&x), &lo, &hi, 3, between);
        let mut f = SAMPLE;
        for (level, (ra, rd)) in out.levels.iter().zip(&cascade) {
            let lsb = level_output_format(f).lsb();
            let e = max_error_lsb(ra, &values(&level.approximation), lsb).max(max_error_lsb(rd, &values(&level.detail), lsb));
            ensure(e <= 8.0, || format!("pyramid level off by {e} LSB"))?;
            f = next_level_input_format(level_output_format(f));
        }
    }
    Ok(())
}

fn structural_equivalence() -> Check {
    let start = Instant::now();
    for (i, mode) in ConfigMode::ALL.iter().enumerate() {
        let c = fabric_equivalence(*mode, 1000, 90 + i as u64);
        ensure(c.passed(), || format!("{mode}: {} of {} streams differ", c.failures, c.cases))?;
    }
    within(Duration::from_secs(60), start)
}

fn pool_conservation() -> Check {
    let cap = CmPool::new().capacity();
    ensure(
        (cap.counter, cap.adder, cap.lut, cap.subtractor, cap.multiplier) == (1, 62, 94, 36, 24),
        || format!("pool totals {cap:?}"),
    )?;
    let specs: Vec<FunctionSpec> = ConfigMode::ALL
        .iter()
        .map(|&m| fpda_cli::spec::function_spec(m, &[], &Config::default()).map_err(|e| e.message))
        .collect::<Result<_, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..1000 {
        let mut pool = CmPool::new();
        for _ in 0..rng.gen_range(0..20) {
            let before = pool.clone();
            if rng.gen_bool(0.6) {
                let spec = &specs[rng.gen_range(0..specs.len())];
                match pool.configure(spec) {
                    Ok(net) => ensure(before.active().is_none() && pool.used() == census(&net), || "configure miscounted".into())?,
                    Err(Error::AlreadyConfigured) => ensure(pool == before, || "failed configure changed the pool".into())?,
                    Err(e) => return Err(e.to_string()),
                }
            } else {
                match pool.release() {
                    Ok(()) => ensure(before.active().is_some(), || "released an idle pool".into())?,
                    Err(Error::NotConfigured) => ensure(pool == before, || "failed release changed the pool".into())?,
                    Err(e) => return Err(e.to_string()),
                }
            }
            for kind in CmKind::ALL {
                ensure(pool.used().get(kind) + pool.free().get(kind) == POOL_CAPACITY.get(kind), || format!("{kind} not conserved"))?;
            }
        }
        let _ = pool.release();
        ensure(pool == CmPool::new(), || "pool did not return to its initial state".into())?;
    }
    let mut pool = CmPool::new();
    ensure(pool.release() == Err(Error::NotConfigured), || "idle release".into())?;
    pool.configure(&specs[0]).map_err(|e| e.to_string())?;
    ensure(pool.configure(&specs[1]) == Err(Error::AlreadyConfigured), || "double configure".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("resource counts reproduce the per-mode table", table_iv_reproduction),
        ("decoder emits the five one-hot words", table_iii_reproduction),
        ("table-driven dot products equal integer MAC", da_exactness),
        ("FIR within 1 LSB of direct convolution", fir_oracle),
        ("IIR two-FIR structure matches the recursion", iir_identity),
        ("FFT against the direct DFT", fft_correctness),
        ("DCT against the direct transform", dct_correctness),
        ("DWT decimation, steady state and pyramid", dwt_correctness),
        ("netlists equal the behavioral kernels", structural_equivalence),
        ("pool conservation and misuse errors", pool_conservation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let t = start.elapsed();
        match result {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({t:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({t:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
