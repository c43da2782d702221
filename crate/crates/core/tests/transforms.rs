use std::cell::Cell;

use fpda_core::cosine::{
    dct16, dct16_exact, dct2d, derive_decomposition, printed_even_even, DCT2D_OUTPUT, DCT_SAMPLE,
};
use fpda_core::fourier::{complex_mul3_raw, complex_mul3_with, dft_naive, fft16, fft16_wide, FftPlan, TwiddleEntry, FFT_SAMPLE};
use fpda_core::numerics::{ComplexFixed, FixedPoint, QFormat};
use fpda_core::oracle::{dct2d_direct, dct_direct, max_error_lsb};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Q2_13: QFormat = QFormat::Q2_13;

fn cx(re: f64, im: f64) -> ComplexFixed {
    ComplexFixed::new(
        fpda_core::numerics::quantize(re, Q2_13).unwrap(),
        fpda_core::numerics::quantize(im, Q2_13).unwrap(),
    )
    .unwrap()
}

fn random_frame(rng: &mut impl Rng) -> Vec<ComplexFixed> {
    (0..16)
        .map(|_| ComplexFixed::from_raw(rng.gen_range(-16384..16384), rng.gen_range(-16384..16384), Q2_13).unwrap())
        .collect()
}

fn component_error(a: &[ComplexFixed], b: &[ComplexFixed]) -> i64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| [(x.re().raw() - y.re().raw()).abs(), (x.im().raw() - y.im().raw()).abs()])
        .max()
        .unwrap()
}

#[test]
fn fft_basis_vectors() {
    let plan = FftPlan::new();
    for k in 0..16 {
        let mut x = vec![cx(0.0, 0.0); 16];
        x[k] = cx(1.0, 0.0);
        let got = fft16(&plan, &x).unwrap();
        assert!(component_error(&got, &dft_naive(&x, 16).unwrap()) <= 4, "basis {k}");
    }
}

#[test]
fn fft_random_vectors() {
    let plan = FftPlan::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let x = random_frame(&mut rng);
        assert!(component_error(&fft16(&plan, &x).unwrap(), &dft_naive(&x, 16).unwrap()) <= 4);
    }
}

#[test]
fn fft_constant_is_a_spike() {
    let y = fft16(&FftPlan::new(), &vec![cx(1.0, 0.0); 16]).unwrap();
    assert!((y[0].re().value() - 16.0).abs() <= 4.0 * FFT_SAMPLE.lsb());
    assert!(y[0].im().raw().abs() <= 4);
    assert!(y[1..].iter().all(|z| z.re().raw().abs() <= 4 && z.im().raw().abs() <= 4));
}

#[test]
fn fft_parseval() {
    let plan = FftPlan::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let x = random_frame(&mut rng);
        let y = fft16(&plan, &x).unwrap();
        let energy = |v: &[ComplexFixed]| v.iter().map(|z| z.re().value().powi(2) + z.im().value().powi(2)).sum::<f64>();
        let (ex, ey) = (energy(&x), energy(&y) / 16.0);
        assert!((ey - ex).abs() <= 0.005 * ex, "{ey} vs {ex}");
    }
}

#[test]
fn three_multiplications_match_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100_000 {
        let (a, b) = (rng.gen_range(-(1i64 << 19)..(1 << 19)), rng.gen_range(-(1i64 << 19)..(1 << 19)));
        let w = TwiddleEntry::from_angle(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let [cms, cps, c] = w.raw();
        let s = c - cms;
        assert_eq!(cps - c, s);
        let calls = Cell::new(0);
        let (re, im) = complex_mul3_raw(a as i128, b as i128, [cms, cps, c].map(i128::from), &mut |x, y| {
            calls.set(calls.get() + 1);
            x * y
        });
        assert_eq!(calls.get(), 3);
        // (a + jb)(c + js)
        let (a, b, c, s) = (a as i128, b as i128, c as i128, s as i128);
        assert_eq!((re, im), (a * c - b * s, a * s + b * c));
    }
}

#[test]
fn rounded_product_counts_three_calls() {
    let mut calls = 0;
    let z = cx(0.5, -0.25).widen(FFT_SAMPLE).unwrap();
    complex_mul3_with(z, &TwiddleEntry::unit_root(3, 16), &mut |x, y| {
        calls += 1;
        x * y
    });
    assert_eq!(calls, 3);
}

proptest! {
    #[test]
    fn wide_fft_is_exactly_linear(sa in any::<u64>(), sb in any::<u64>()) {
        let plan = FftPlan::new();
        let x = random_frame(&mut ChaCha8Rng::seed_from_u64(sa));
        let z = random_frame(&mut ChaCha8Rng::seed_from_u64(sb));
        let sum: Vec<ComplexFixed> = x
            .iter()
            .zip(&z)
            .map(|(p, q)| {
                let p = p.widen(FFT_SAMPLE).unwrap();
                let q = q.widen(FFT_SAMPLE).unwrap();
                ComplexFixed::from_raw(p.re().raw() + q.re().raw(), p.im().raw() + q.im().raw(), FFT_SAMPLE).unwrap()
            })
            .collect();
        let (fx, fz, fs) = (fft16_wide(&plan, &x).unwrap(), fft16_wide(&plan, &z).unwrap(), fft16_wide(&plan, &sum).unwrap());
        for k in 0..16 {
            prop_assert_eq!(fs.values[k].0, fx.values[k].0 + fz.values[k].0);
            prop_assert_eq!(fs.values[k].1, fx.values[k].1 + fz.values[k].1);
        }
    }

    #[test]
    fn wide_dct_is_exactly_linear(x in prop::array::uniform16(-8192i64..8192), z in prop::array::uniform16(-8192i64..8192)) {
        let fx = |v: &[i64]| dct16_exact(&v.iter().map(|&r| FixedPoint::from_raw(r, Q2_13).unwrap()).collect::<Vec<_>>()).unwrap();
        let sum: Vec<i64> = x.iter().zip(&z).map(|(a, b)| a + b).collect();
        let (a, b, s) = (fx(&x), fx(&z), fx(&sum));
        for k in 0..16 {
            prop_assert_eq!(s[k], a[k] + b[k]);
        }
    }
}

#[test]
fn decomposition_matches_definition() {
    let dec = derive_decomposition(16).unwrap();
    assert_eq!(dec.even_even, printed_even_even());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let x: Vec<f64> = (0..16).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let got = dec.apply(&x).unwrap();
        let want = dct_direct(&x);
        assert!(got.iter().zip(&want).all(|(a, b)| (a - b).abs() <= 1e-9));
    }
}

fn random_dct_input(rng: &mut impl Rng) -> Vec<FixedPoint> {
    (0..16).map(|_| FixedPoint::from_raw(rng.gen_range(-8192..8192), Q2_13).unwrap()).collect()
}

#[test]
fn dct_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..1000 {
        let x = random_dct_input(&mut rng);
        let want = dct_direct(&x.iter().map(|v| v.value()).collect::<Vec<_>>());
        let got: Vec<f64> = dct16(&x).unwrap().iter().map(|v| v.value()).collect();
        assert!(max_error_lsb(&want, &got, DCT_SAMPLE.lsb()) <= 4.0);
    }
}

#[test]
fn dct_constant_input() {
    let y = dct16(&vec![FixedPoint::from_raw(8192, Q2_13).unwrap(); 16]).unwrap();
    // The coefficient A/8 carries its own Q1.15 rounding into Y0.
    assert!((y[0].value() - std::f64::consts::SQRT_2).abs() <= 2.0 * DCT_SAMPLE.lsb());
    assert!(y[1..].iter().all(|v| v.raw().abs() <= 1));
}

#[test]
fn dct2d_matches_reference_and_transposes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let block: Vec<Vec<FixedPoint>> = (0..16).map(|_| random_dct_input(&mut rng)).collect();
        let y = dct2d(&block).unwrap();
        let values: Vec<Vec<f64>> = block.iter().map(|r| r.iter().map(|v| v.value()).collect()).collect();
        let want = dct2d_direct(&values);
        for (r, w) in y.iter().zip(&want) {
            let got: Vec<f64> = r.iter().map(|v| v.value()).collect();
            assert!(max_error_lsb(w, &got, DCT2D_OUTPUT.lsb()) <= 8.0);
        }
        let transposed: Vec<Vec<FixedPoint>> = (0..16).map(|c| (0..16).map(|r| block[r][c]).collect()).collect();
        let yt = dct2d(&transposed).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                assert_eq!(yt[r][c], y[c][r]);
            }
        }
    }
}
