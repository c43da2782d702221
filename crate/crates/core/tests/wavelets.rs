#![allow(clippy::approx_constant)]

use fpda_core::filter::fir_filter;
use fpda_core::numerics::{FixedPoint, QFormat};
use fpda_core::oracle::{analysis_level, dwt_direct, max_error_lsb, round_to_grid};
use fpda_core::wavelet::{
    decimate, dwt_level, dwt_pyramid, level_output_format, next_level_input_format, Branch, DilationPair, DAUBECHIES8_H0,
    DAUBECHIES8_L0,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn samples(rng: &mut impl Rng, n: usize) -> Vec<FixedPoint> {
    (0..n).map(|_| FixedPoint::from_raw(rng.gen_range(-128..128), QFormat::Q1_7).unwrap()).collect()
}

fn values(x: &[FixedPoint]) -> Vec<f64> {
    x.iter().map(|v| v.value()).collect()
}

proptest! {
    #[test]
    fn decimator_keeps_every_second_fir_output(raw in prop::collection::vec(-128i64..128, 0..200), high in any::<bool>()) {
        let pair = DilationPair::daubechies8();
        let branch = if high { Branch::Highpass } else { Branch::Lowpass };
        let spec = pair.branch_filter(branch, level_output_format(QFormat::Q1_7));
        let x: Vec<FixedPoint> = raw.iter().map(|&v| FixedPoint::from_raw(v, QFormat::Q1_7).unwrap()).collect();
        let kept: Vec<FixedPoint> = fir_filter(&spec, &x).into_iter().step_by(2).take(x.len() / 2).collect();
        let got = decimate(&spec, &x);
        prop_assert_eq!(got.len(), x.len() / 2);
        prop_assert_eq!(got, kept);
    }
}

#[test]
fn constant_input_steady_state() {
    let pair = DilationPair::daubechies8();
    // Q1.7 cannot hold +1.0, so drive with -1.0 and negate.
    let x = vec![FixedPoint::from_raw(-128, QFormat::Q1_7).unwrap(); 64];
    let (a, d) = dwt_level(&pair, &x).unwrap();
    let lsb = level_output_format(QFormat::Q1_7).lsb();
    let low_sum: f64 = DAUBECHIES8_L0.iter().sum();
    let high_sum: f64 = DAUBECHIES8_H0.iter().sum();
    assert!((low_sum - 1.4142).abs() < 1e-9);
    for v in &a[4..] {
        assert!((-v.value() - 1.4142).abs() <= 8.0 * lsb, "{}", v.value());
    }
    for v in &d[4..] {
        assert!((-v.value()).abs() <= 2e-4 + 8.0 * lsb, "{}", v.value());
        assert!((-v.value() - high_sum).abs() <= 8.0 * lsb);
    }
}

fn pyramid_input(rng: &mut impl Rng) -> Vec<FixedPoint> {
    samples(rng, 64)
}

#[test]
fn pyramid_levels_match_mallat_analysis() {
    let pair = DilationPair::daubechies8();
    let (low, high) = (values(pair.l0()), values(pair.h0()));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let x = pyramid_input(&mut rng);
        let out = dwt_pyramid(&pair, &x, 3).unwrap();
        let mut input = values(&x);
        let mut format = QFormat::Q1_7;
        for level in &out.levels {
            let lsb = level_output_format(format).lsb();
            let a = values(&level.approximation);
            assert!(max_error_lsb(&analysis_level(&input, &low), &a, lsb) <= 8.0);
            assert!(max_error_lsb(&analysis_level(&input, &high), &values(&level.detail), lsb) <= 8.0);
            format = next_level_input_format(level_output_format(format));
            input = a.iter().map(|&v| round_to_grid(v, format.fraction_bits() as u32)).collect();
        }
    }
}

/// Rounds a level's double-precision approximation to that level's output
/// grid, then to the next level's 8-bit input grid.
fn requantize_between(level: usize, v: f64) -> f64 {
    let mut input = QFormat::Q1_7;
    for _ in 0..level {
        input = next_level_input_format(level_output_format(input));
    }
    let output = level_output_format(input);
    let next = next_level_input_format(output);
    round_to_grid(round_to_grid(v, output.fraction_bits() as u32), next.fraction_bits() as u32)
}

#[test]
fn pyramid_matches_quantized_cascade() {
    let pair = DilationPair::daubechies8();
    let (low, high) = (values(pair.l0()), values(pair.h0()));
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut worst = [0.0f64; 3];
    for _ in 0..1000 {
        let x = pyramid_input(&mut rng);
        let out = dwt_pyramid(&pair, &x, 3).unwrap();
        let cascade = dwt_direct(&values(&x), &low, &high, 3, requantize_between);
        let mut format = QFormat::Q1_7;
        for (j, (level, (a, d))) in out.levels.iter().zip(&cascade).enumerate() {
            let lsb = level_output_format(format).lsb();
            worst[j] = worst[j]
                .max(max_error_lsb(a, &values(&level.approximation), lsb))
                .max(max_error_lsb(d, &values(&level.detail), lsb));
            format = next_level_input_format(level_output_format(format));
        }
    }
    assert!(worst.iter().all(|&w| w <= 8.0), "{worst:?}");
}

#[test]
fn pyramid_tracks_double_cascade() {
    let pair = DilationPair::daubechies8();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = [0.0f64; 3];
    for _ in 0..1000 {
        let x = pyramid_input(&mut rng);
        let out = dwt_pyramid(&pair, &x, 3).unwrap();
        let ideal = dwt_direct(&values(&x), &DAUBECHIES8_L0, &DAUBECHIES8_H0, 3, |_, v| v);
        let mut format = QFormat::Q1_7;
        for (j, (level, (a, d))) in out.levels.iter().zip(&ideal).enumerate() {
            let lsb = level_output_format(format).lsb();
            worst[j] = worst[j]
                .max(max_error_lsb(a, &values(&level.approximation), lsb))
                .max(max_error_lsb(d, &values(&level.detail), lsb));
            format = next_level_input_format(level_output_format(format));
        }
    }
    println!("worst error per level (LSB of that level's output): {worst:?}");
    assert!(worst[0] <= 8.0);
}

#[test]
fn pyramid_energy_is_bounded() {
    let pair = DilationPair::daubechies8();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let x = samples(&mut rng, 1024);
        let out = dwt_pyramid(&pair, &x, 1).unwrap();
        let e = |v: &[FixedPoint]| v.iter().map(|s| s.value().powi(2)).sum::<f64>();
        let level = &out.levels[0];
        // Orthonormal up to edge effects and coefficient rounding.
        let ratio = (e(&level.approximation) + e(&level.detail)) / e(&x);
        assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
    }
}
